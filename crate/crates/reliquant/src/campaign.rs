//! Campaign engine (stub).

//! Operational profiles (stub).

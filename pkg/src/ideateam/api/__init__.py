"""HTTP surface: team CRUD, session control, event streams, reflection."""

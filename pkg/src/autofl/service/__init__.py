"""Analysis entry points: run configuration, pipeline, CLI, and HTTP API."""

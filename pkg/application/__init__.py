"""Application layer - experiment documents and pipeline use cases."""

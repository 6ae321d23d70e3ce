"""API layer - scheme inspection endpoints and request/response models."""

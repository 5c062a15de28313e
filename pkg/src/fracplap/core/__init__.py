"""Core utilities: constants, logging, errors and configuration."""

"""Command-line interface for RXNEmb."""

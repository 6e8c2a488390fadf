"""RXNEmb CLI commands."""

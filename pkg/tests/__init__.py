"""RXNEmb test suite."""

"""Model and harness modules."""

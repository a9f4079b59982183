"""Exact limiting thermodynamics of pure multi-species spherical p-spin glasses."""

"""Exact workbench for generalized Bell correlator polytopes."""

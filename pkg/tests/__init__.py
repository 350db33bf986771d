"""Tests for the frp-beam-designer package."""

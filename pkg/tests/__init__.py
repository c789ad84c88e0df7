"""Tests for parastep."""

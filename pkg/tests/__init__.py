"""
Tests for lava-sysid
"""

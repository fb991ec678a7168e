"""Bundled scenario presets (TOML files shipped as package data)."""

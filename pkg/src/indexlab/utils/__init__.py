"""Utilitaires."""

"""Données déclaratives embarquées (contraintes de la littérature)."""

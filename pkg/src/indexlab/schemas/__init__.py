"""Schémas Pydantic (configuration de run, requêtes et réponses de l'API)."""

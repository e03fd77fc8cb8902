"""Services de calcul (noyau complexe, surfaces, topologie, spectral, formes)."""

"""indexlab : indice de Morse des surfaces minimales complètes de courbure totale finie."""

__version__ = "0.1.0"

"""Énumération des topologies compatibles avec un budget d'indice.

La borne inférieure croît strictement en g et en Σ(dⱼ+1) : pour chaque genre
on borne Σ(dⱼ+1), on liste les multiplicités possibles puis on applique les
contraintes (non-planéité, plongement, nombre de bouts, faits cités).
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any

from indexlab.exceptions import ConfigError
from indexlab.logging_conf import get_logger
from indexlab.services.topology import Sidedness, SurfaceTopology, index_lower_bound

logger = get_logger(__name__)

NONFLAT_CITATION = "Hoffman-Karcher, Proposition 3.1: Σ(dⱼ+1) ≥ 4 for a nonflat surface"


class FactKind(str, Enum):
    """Nature d'un fait de la littérature."""

    NONEXISTENT = "nonexistent"
    KNOWN_INDEX = "known_index"
    FAMILY = "family"


@dataclass(frozen=True)
class LiteratureFact:
    """Fait cité portant sur une topologie précise."""

    kind: FactKind
    topology: SurfaceTopology
    citation: str
    index: int | None = None
    family: str | None = None

    def excludes(self, budget: int) -> bool:
        """Vrai si le fait exclut la topologie pour ce budget d'indice."""
        if self.kind == FactKind.NONEXISTENT:
            return True
        if self.kind == FactKind.KNOWN_INDEX:
            return self.index is not None and self.index > budget
        return False

    def describe(self) -> str:
        if self.kind == FactKind.KNOWN_INDEX:
            return f"known index {self.index} [{self.citation}]"
        if self.kind == FactKind.FAMILY:
            return f"member of the {self.family} family [{self.citation}]"
        return f"does not exist [{self.citation}]"

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "topology": self.topology.to_dict(),
            "citation": self.citation,
            "index": self.index,
            "family": self.family,
        }


@dataclass(frozen=True)
class FeasibilityConstraints:
    """Contraintes activables individuellement.

    Attributes:
        nonflat: Impose Σ(dⱼ+1) ≥ 4
        embedded: Impose dⱼ = 1 pour tout j
        min_ends: Nombre minimal de bouts
        min_genus: Genre minimal
        max_ends: Nombre maximal de bouts (None : pas de limite)
        literature: Faits cités appliqués comme exclusions ou annotations
        citations: Référence de chaque contrainte fournie par l'utilisateur
    """

    nonflat: bool = False
    embedded: bool = False
    min_ends: int = 1
    min_genus: int = 0
    max_ends: int | None = None
    literature: tuple[LiteratureFact, ...] = ()
    citations: tuple[tuple[str, str], ...] = field(default=())

    def citation_for(self, key: str) -> str:
        for name, text in self.citations:
            if name == key:
                return text
        if key == "nonflat":
            return NONFLAT_CITATION
        return "user-supplied constraint"

    def with_literature(self, path: Path | None = None) -> FeasibilityConstraints:
        """Copie des contraintes enrichie des faits du fichier de littérature."""
        return FeasibilityConstraints(
            nonflat=self.nonflat,
            embedded=self.embedded,
            min_ends=self.min_ends,
            min_genus=self.min_genus,
            max_ends=self.max_ends,
            literature=self.literature + tuple(load_literature(path)),
            citations=self.citations,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "nonflat": self.nonflat,
            "embedded": self.embedded,
            "min_ends": self.min_ends,
            "min_genus": self.min_genus,
            "max_ends": self.max_ends,
            "literature": [fact.to_dict() for fact in self.literature],
            "citations": {name: text for name, text in self.citations},
        }


@dataclass
class CaseRow:
    """Une ligne de l'analyse de cas : un genre, son plafond et ses survivants."""

    genus: int
    weight_cap: int
    candidates: list[SurfaceTopology] = field(default_factory=list)
    survivors: list[SurfaceTopology] = field(default_factory=list)
    excluded: list[tuple[SurfaceTopology, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "genus": self.genus,
            "weight_cap": self.weight_cap,
            "candidates": [t.to_dict() for t in self.candidates],
            "survivors": [t.to_dict() for t in self.survivors],
            "excluded": [{"topology": t.to_dict(), "reason": r} for t, r in self.excluded],
            "notes": list(self.notes),
        }


# --- fichier de littérature ---


def _default_literature() -> Path:
    return Path(str(resources.files("indexlab.data").joinpath("literature_constraints.txt")))


def _parse_fact(line: str, lineno: int) -> LiteratureFact:
    entries: dict[str, str] = {}
    for chunk in line.split(";"):
        if not chunk.strip():
            continue
        if "=" not in chunk:
            raise ConfigError(f"literature line {lineno}: expected 'key = value', got {chunk!r}")
        key, value = chunk.split("=", 1)
        entries[key.strip()] = value.strip()

    missing = {"kind", "genus", "d", "citation"} - entries.keys()
    if missing:
        raise ConfigError(f"literature line {lineno}: missing {sorted(missing)}")
    if not entries["citation"]:
        raise ConfigError(f"literature line {lineno}: empty citation")
    try:
        kind = FactKind(entries["kind"])
        topology = SurfaceTopology.of(
            int(entries["genus"]),
            [int(d) for d in entries["d"].split(",")],
            entries.get("sided", "two"),
        )
        index = int(entries["index"]) if "index" in entries else None
    except ValueError as e:
        raise ConfigError(f"literature line {lineno}: {e}") from e
    if kind == FactKind.KNOWN_INDEX and index is None:
        raise ConfigError(f"literature line {lineno}: known_index requires 'index'")
    return LiteratureFact(
        kind=kind,
        topology=topology,
        citation=entries["citation"],
        index=index,
        family=entries.get("family"),
    )


def load_literature(path: Path | None = None) -> list[LiteratureFact]:
    """Charge le fichier de contraintes (format clé = valeur, une entrée par ligne).

    Raises:
        ConfigError: Ligne illisible ou citation absente
    """
    source = Path(path) if path is not None else _default_literature()
    facts = []
    for lineno, raw in enumerate(source.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        facts.append(_parse_fact(line, lineno))
    logger.debug(f"Loaded {len(facts)} literature facts from {source}")
    return facts


# --- énumération ---


def weight_cap(budget: int, genus: int, sided: Sidedness) -> int:
    """Plus grand Σ(dⱼ+1) dont la borne inférieure reste ≤ budget à ce genre."""
    if sided == Sidedness.TWO:
        return (3 * budget + 5 - 2 * genus) // 2
    return (3 * budget + 4 - genus) // 2


def genus_cap(budget: int, sided: Sidedness) -> int:
    """Plus grand genre admettant au moins un bout (Σ(dⱼ+1) ≥ 2)."""
    if sided == Sidedness.TWO:
        return (3 * budget + 1) // 2
    return 3 * budget


def _end_tuples(weight: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Multiplicités décroissantes (d₁ ≥ d₂ ≥ …) avec Σ(dⱼ+1) = weight."""
    if weight == 0:
        yield ()
        return
    top = weight - 1 if largest is None else min(largest, weight - 1)
    for d in range(top, 0, -1):
        for rest in _end_tuples(weight - d - 1, d):
            yield (d, *rest)


def _constraint_failure(t: SurfaceTopology, constraints: FeasibilityConstraints) -> str | None:
    if constraints.nonflat and t.end_weight < 4:
        return f"flat: Σ(dⱼ+1) = {t.end_weight} < 4 [{constraints.citation_for('nonflat')}]"
    if constraints.embedded and not t.embedded_ends:
        return f"not embedded [{constraints.citation_for('embedded')}]"
    if t.ends < constraints.min_ends:
        return f"r = {t.ends} < {constraints.min_ends} [{constraints.citation_for('min_ends')}]"
    if constraints.max_ends is not None and t.ends > constraints.max_ends:
        return f"r = {t.ends} > {constraints.max_ends} [{constraints.citation_for('max_ends')}]"
    return None


def case_split(
    budget: int,
    sided: Sidedness | str = Sidedness.TWO,
    constraints: FeasibilityConstraints | None = None,
) -> list[CaseRow]:
    """Analyse de cas genre par genre.

    Pour chaque genre à partir de min_genus : plafond de Σ(dⱼ+1) imposé par la
    borne, candidats, exclusions motivées et survivants.
    """
    if budget < 0:
        raise ValueError("le budget d'indice doit être ≥ 0")
    sided = Sidedness(sided)
    constraints = constraints or FeasibilityConstraints()

    rows = []
    for genus in range(constraints.min_genus, genus_cap(budget, sided) + 1):
        cap = weight_cap(budget, genus, sided)
        row = CaseRow(genus=genus, weight_cap=cap)
        for weight in range(2, cap + 1):
            for mults in _end_tuples(weight):
                t = SurfaceTopology.of(genus, mults, sided)
                if index_lower_bound(t) > budget:
                    continue
                row.candidates.append(t)
                reason = _constraint_failure(t, constraints)
                if reason is None:
                    for fact in constraints.literature:
                        if fact.topology != t:
                            continue
                        if fact.excludes(budget):
                            reason = fact.describe()
                            break
                        row.notes.append(f"{t.label()}: {fact.describe()}")
                if reason is None:
                    row.survivors.append(t)
                else:
                    row.excluded.append((t, reason))
        row.candidates.sort()
        row.survivors.sort()
        rows.append(row)
        logger.debug(
            f"Genus {genus}: cap {cap}, {len(row.candidates)} candidates, "
            f"{len(row.survivors)} survivors"
        )
    return rows


def enumerate_feasible(
    budget: int,
    sided: Sidedness | str = Sidedness.TWO,
    constraints: FeasibilityConstraints | None = None,
) -> list[SurfaceTopology]:
    """Toutes les topologies de borne inférieure ≤ budget satisfaisant les contraintes.

    Ordre déterministe (g, r, multiplicités).
    """
    rows = case_split(budget, sided, constraints)
    found = sorted(t for row in rows for t in row.survivors)
    logger.info(f"Enumerated {len(found)} feasible topologies for budget {budget} ({Sidedness(sided).value}-sided)")
    return found

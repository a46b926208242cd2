"""
specnova - Chemistry
Kütle aritmetiği: residue kütleleri, modifikasyonlar, peptide kütlesi, fragment iyonlar
"""

import hashlib
import itertools
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import orjson

from config.constants import (
    AMINO_ACID_MASSES,
    CO_MASS,
    MASS_TABLE_VERSION,
    MODIFIED_RESIDUES,
    PROTON_MASS,
    STANDARD_RESIDUES,
    WATER_MASS,
    IonType,
    Modification,
    ToleranceUnit,
)
from core.exceptions import RejectedInputError

MAX_FRAGMENT_CHARGE = 2

_TOKEN_PATTERN = re.compile(r"([A-Z])(?:\(([a-z]+)\))?")


@dataclass(frozen=True)
class ResidueToken:
    """Tek residue + opsiyonel modifikasyon"""
    symbol: str
    mod: Optional[Modification] = None

    def __post_init__(self):
        if self.symbol not in AMINO_ACID_MASSES:
            raise RejectedInputError(f"Bilinmeyen residue: {self.symbol!r}")
        if self.mod is not None and self.symbol not in self.mod.hosts:
            raise RejectedInputError(f"{self.mod.value} modifikasyonu {self.symbol} üzerinde geçersiz")

    @property
    def label(self) -> str:
        if self.mod is None:
            return self.symbol
        return f"{self.symbol}({self.mod.value})"

    def __str__(self) -> str:
        return self.label


class ResidueTable:
    """Değiştirilemez residue kütle tablosu"""

    def __init__(self, entries: Mapping[ResidueToken, float], water_mass: float = WATER_MASS, proton_mass: float = PROTON_MASS):
        for token, mass in entries.items():
            if mass <= 0:
                raise RejectedInputError(f"Residue kütlesi pozitif olmalı: {token.label}")
        self._entries = MappingProxyType(dict(entries))
        self.water_mass = water_mass
        self.proton_mass = proton_mass

    @classmethod
    def standard(cls) -> 'ResidueTable':
        entries: Dict[ResidueToken, float] = {}
        for symbol in STANDARD_RESIDUES:
            entries[ResidueToken(symbol)] = AMINO_ACID_MASSES[symbol]
        for symbol, mod in MODIFIED_RESIDUES:
            entries[ResidueToken(symbol, mod)] = AMINO_ACID_MASSES[symbol] + mod.delta
        return cls(entries)

    @property
    def entries(self) -> Mapping[ResidueToken, float]:
        return self._entries

    @property
    def tokens(self) -> Tuple[ResidueToken, ...]:
        return tuple(self._entries)

    def mass(self, token: ResidueToken) -> float:
        try:
            return self._entries[token]
        except KeyError:
            raise RejectedInputError(f"Tabloda olmayan token: {token.label}") from None

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, token) -> bool:
        return token in self._entries


DEFAULT_TABLE = ResidueTable.standard()


@dataclass(frozen=True)
class Peptide:
    """Residue token dizisi"""
    tokens: Tuple[ResidueToken, ...]

    def __post_init__(self):
        if not self.tokens:
            raise RejectedInputError("Boş peptide")
        object.__setattr__(self, 'tokens', tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __str__(self) -> str:
        return self.sequence_key

    @property
    def sequence_key(self) -> str:
        """Kanonik token string'i - tie-break ve dedupe anahtarı"""
        return "".join(token.label for token in self.tokens)

    @property
    def plain_sequence(self) -> str:
        return "".join(token.symbol for token in self.tokens)

    def reversed(self) -> 'Peptide':
        return Peptide(self.tokens[::-1])

    @classmethod
    def from_string(cls, text: str, max_length: Optional[int] = None) -> 'Peptide':
        return parse_peptide(text, max_length=max_length)


@dataclass(frozen=True)
class FragmentIon:
    """Teorik fragment iyon"""
    kind: IonType
    index: int
    charge: int
    mz: float


@dataclass(frozen=True)
class Tolerance:
    """Kütle toleransı (ppm veya Da)"""
    value: float
    unit: ToleranceUnit

    def __post_init__(self):
        if self.value < 0:
            raise RejectedInputError(f"Tolerans negatif olamaz: {self.value}")

    @classmethod
    def ppm(cls, value: float) -> 'Tolerance':
        return cls(value, ToleranceUnit.PPM)

    @classmethod
    def da(cls, value: float) -> 'Tolerance':
        return cls(value, ToleranceUnit.DA)

    def width(self, mass):
        """Referans kütle için mutlak yarı-genişlik (Da); numpy dizileriyle de çalışır"""
        if self.unit is ToleranceUnit.PPM:
            return np.abs(mass) * self.value * 1e-6
        if isinstance(mass, np.ndarray):
            return np.full(mass.shape, float(self.value))
        return float(self.value)


@dataclass(frozen=True)
class ModSpec:
    """Modifikasyon tanımı, ör. 'deam:NQ'"""
    mod: Modification
    residues: frozenset

    def __post_init__(self):
        bad = set(self.residues) - set(self.mod.hosts)
        if bad:
            raise RejectedInputError(f"{self.mod.value} şu residue'lerde geçersiz: {''.join(sorted(bad))}")

    @classmethod
    def parse(cls, text: str) -> 'ModSpec':
        name, _, residues = text.strip().partition(':')
        try:
            mod = Modification(name.strip())
        except ValueError:
            raise RejectedInputError(f"Bilinmeyen modifikasyon: {name!r}") from None
        residues = residues.strip() or "".join(sorted(mod.hosts))
        return cls(mod, frozenset(residues))


def parse_mod_specs(text: str) -> List[ModSpec]:
    """'ox:M,deam:NQ' -> ModSpec listesi"""
    return [ModSpec.parse(part) for part in text.split(',') if part.strip()]


def parse_peptide(text: str, max_length: Optional[int] = None) -> Peptide:
    """'AC(cam)K' veya 'A C(cam) K' formatını Peptide'e çevir"""
    compact = "".join(text.split())
    tokens = []
    position = 0
    for match in _TOKEN_PATTERN.finditer(compact):
        if match.start() != position:
            break
        symbol, mod_name = match.groups()
        mod = None
        if mod_name is not None:
            try:
                mod = Modification(mod_name)
            except ValueError:
                raise RejectedInputError(f"Bilinmeyen modifikasyon: {mod_name!r} ({text!r})") from None
        tokens.append(ResidueToken(symbol, mod))
        position = match.end()
    if position != len(compact) or not tokens:
        raise RejectedInputError(f"Peptide parse edilemedi: {text!r}")
    if max_length is not None and len(tokens) > max_length:
        raise RejectedInputError(f"Peptide çok uzun ({len(tokens)} > {max_length}): {text!r}")
    return Peptide(tuple(tokens))


def residue_mass(token: ResidueToken, table: ResidueTable = DEFAULT_TABLE) -> float:
    """Residue kütlesi = baz kütle + modifikasyon delta"""
    return table.mass(token)


def residue_masses(peptide: Peptide, table: ResidueTable = DEFAULT_TABLE) -> np.ndarray:
    return np.array([table.mass(token) for token in peptide.tokens], dtype=float)


def peptide_mass(peptide: Peptide, table: ResidueTable = DEFAULT_TABLE) -> float:
    """Nötr peptide kütlesi = residue toplamı + su"""
    return float(residue_masses(peptide, table).sum()) + table.water_mass


def precursor_mz(neutral_mass: float, charge: int, table: ResidueTable = DEFAULT_TABLE) -> float:
    """Nötr kütleden precursor m/z"""
    if charge < 1:
        raise RejectedInputError(f"Charge en az 1 olmalı: {charge}")
    return (neutral_mass + charge * table.proton_mass) / charge


def fragment_mzs(
    peptide: Peptide,
    kinds: Iterable[IonType] = (IonType.B, IonType.Y),
    charge: int = 1,
    table: ResidueTable = DEFAULT_TABLE
) -> List[FragmentIon]:
    """
    Teorik fragment iyonlar (tam uzunluk b_n/y_n hariç)
    Çıktı (kind, index) sırasında
    """
    kinds = set(kinds)
    if charge < 1 or charge > MAX_FRAGMENT_CHARGE:
        raise RejectedInputError(f"Fragment charge 1..{MAX_FRAGMENT_CHARGE} olmalı: {charge}")
    unknown = kinds - set(IonType)
    if unknown:
        raise RejectedInputError(f"Bilinmeyen iyon türü: {unknown}")

    masses = residue_masses(peptide, table)
    n = len(masses)
    prefix = np.cumsum(masses)
    suffix = np.cumsum(masses[::-1])
    protons = charge * table.proton_mass

    ions: List[FragmentIon] = []
    for kind in sorted(kinds, key=lambda k: k.value):
        for i in range(1, n):
            if kind is IonType.B:
                neutral = prefix[i - 1]
            elif kind is IonType.A:
                neutral = prefix[i - 1] - CO_MASS
            else:
                neutral = suffix[i - 1] + table.water_mass
            ions.append(FragmentIon(kind, i, charge, float((neutral + protons) / charge)))
    return ions


def ppm_window(mass: float, tol: Tolerance) -> Tuple[float, float]:
    """Tolerans penceresi (lo, hi)"""
    if mass <= 0:
        raise RejectedInputError(f"Kütle pozitif olmalı: {mass}")
    width = tol.width(mass)
    return mass - width, mass + width


def expand_modifications(
    peptide: Peptide,
    fixed: Sequence[ModSpec] = (),
    variable: Sequence[ModSpec] = (),
    max_var: int = 2
) -> List[Peptide]:
    """
    Sabit modifikasyonları her uygun pozisyona uygula,
    değişken modifikasyonları en fazla max_var adet olacak şekilde tüm alt kümelerle çoğalt
    """
    if max_var < 0:
        raise RejectedInputError(f"max_var negatif olamaz: {max_var}")

    tokens = list(peptide.tokens)
    for spec in fixed:
        for i, token in enumerate(tokens):
            if token.mod is None and token.symbol in spec.residues:
                tokens[i] = ResidueToken(token.symbol, spec.mod)

    # Pozisyon -> uygulanabilir değişken modifikasyonlar
    options: Dict[int, List[Modification]] = {}
    for i, token in enumerate(tokens):
        if token.mod is not None:
            continue
        mods = [spec.mod for spec in variable if token.symbol in spec.residues]
        if mods:
            options[i] = list(dict.fromkeys(mods))

    variants: Dict[Tuple[ResidueToken, ...], Peptide] = {}
    base = tuple(tokens)
    variants[base] = Peptide(base)

    sites = sorted(options)
    for size in range(1, min(max_var, len(sites)) + 1):
        for chosen in itertools.combinations(sites, size):
            for mods in itertools.product(*(options[i] for i in chosen)):
                modified = list(base)
                for i, mod in zip(chosen, mods):
                    modified[i] = ResidueToken(modified[i].symbol, mod)
                key = tuple(modified)
                if key not in variants:
                    variants[key] = Peptide(key)
    return list(variants.values())


def mass_table_hash(table: ResidueTable = DEFAULT_TABLE) -> bytes:
    """Kütle tablosunun SHA-256 özeti (index cache koruması)"""
    payload = {
        'version': MASS_TABLE_VERSION,
        'water': table.water_mass,
        'proton': table.proton_mass,
        'residues': {token.label: mass for token, mass in table.entries.items()},
    }
    return hashlib.sha256(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS)).digest()


PeptideLike = Union[Peptide, str]


def as_peptide(value: PeptideLike) -> Peptide:
    return value if isinstance(value, Peptide) else parse_peptide(value)

"""
Core package initialization

Arama modülleri (scorer, search, searcher, assembly) doğrudan import edilir:
msio ve config bu paketin chem/exceptions modüllerine bağımlıdır.
"""

from core.exceptions import (
    SpecnovaError,
    RejectedInputError,
    ParseError,
    FetchError,
    ConfigError,
    IndexFormatError,
    ScorerError
)
from core.chem import (
    ResidueToken,
    ResidueTable,
    Peptide,
    FragmentIon,
    Tolerance,
    DEFAULT_TABLE,
    parse_peptide,
    peptide_mass,
    fragment_mzs,
    ppm_window,
    expand_modifications
)

__all__ = [
    'SpecnovaError',
    'RejectedInputError',
    'ParseError',
    'FetchError',
    'ConfigError',
    'IndexFormatError',
    'ScorerError',
    'ResidueToken',
    'ResidueTable',
    'Peptide',
    'FragmentIon',
    'Tolerance',
    'DEFAULT_TABLE',
    'parse_peptide',
    'peptide_mass',
    'fragment_mzs',
    'ppm_window',
    'expand_modifications'
]

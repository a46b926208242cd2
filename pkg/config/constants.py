"""
specnova - Constants
Sabit değerler, kütle tablosu ve enum'lar
"""

from enum import Enum

# Kütle tablosu versiyonu - tablo değişirse index cache'leri geçersiz olur
MASS_TABLE_VERSION = "1"

# Monoizotopik kütleler (Dalton)
WATER_MASS = 18.010565
PROTON_MASS = 1.007276
CO_MASS = 27.994915

# 20 standart amino asit - residue kütleleri
AMINO_ACID_MASSES = {
    'G': 57.02146,
    'A': 71.03711,
    'S': 87.03203,
    'P': 97.05276,
    'V': 99.06841,
    'T': 101.04768,
    'C': 103.00919,
    'L': 113.08406,
    'I': 113.08406,
    'N': 114.04293,
    'D': 115.02694,
    'Q': 128.05858,
    'K': 128.09496,
    'E': 129.04259,
    'M': 131.04049,
    'H': 137.05891,
    'F': 147.06841,
    'R': 156.10111,
    'Y': 163.06333,
    'W': 186.07931,
}

# Vocabulary sırası sabit - index'ler stabil kalmalı
STANDARD_RESIDUES = "ACDEFGHIKLMNPQRSTVWY"

# FASTA'da görülebilen belirsiz residue'ler (kütlesi tanımsız)
WILDCARD_RESIDUES = frozenset("BJOUXZ")

END_TOKEN = "END"


class Modification(Enum):
    """Desteklenen modifikasyonlar"""
    CARBAMIDOMETHYL = "cam"
    OXIDATION = "ox"
    DEAMIDATION = "deam"

    @property
    def delta(self) -> float:
        return MODIFICATION_DELTAS[self]

    @property
    def hosts(self) -> frozenset:
        return MODIFICATION_HOSTS[self]


MODIFICATION_DELTAS = {
    Modification.CARBAMIDOMETHYL: 57.02146,
    Modification.OXIDATION: 15.99491,
    Modification.DEAMIDATION: 0.98402,
}

MODIFICATION_HOSTS = {
    Modification.CARBAMIDOMETHYL: frozenset("C"),
    Modification.OXIDATION: frozenset("M"),
    Modification.DEAMIDATION: frozenset("NQ"),
}

# Modifiye token'lar - vocabulary'de standart 20'den sonra gelir
MODIFIED_RESIDUES = (
    ('C', Modification.CARBAMIDOMETHYL),
    ('M', Modification.OXIDATION),
    ('N', Modification.DEAMIDATION),
    ('Q', Modification.DEAMIDATION),
)


class IonType(Enum):
    """Fragment iyon türleri"""
    A = "a"
    B = "b"
    Y = "y"


class ToleranceUnit(Enum):
    """Tolerans birimleri"""
    PPM = "ppm"
    DA = "Da"


class Direction(Enum):
    """Sekanslama yönü"""
    FORWARD = "forward"
    BACKWARD = "backward"


class PsmSource(Enum):
    """PSM kaynağı"""
    DB = "db"
    DENOVO = "denovo"
    HYBRID = "hybrid"


class HybridChoice(Enum):
    """Hybrid karar sonucu"""
    DB = "db"
    DENOVO = "denovo"
    NONE = "none"


class WildcardPolicy(Enum):
    """FASTA wildcard residue politikası"""
    SPLIT = "split"
    SKIP = "skip"


class SearchMode(Enum):
    """Arama modları"""
    DB = "dbsearch"
    DENOVO = "denovo"
    HYBRID = "hybrid"


# PSM TSV kolonları (sıra sabit)
PSM_COLUMNS = [
    'spectrum_id',
    'sequence',
    'score',
    'rank',
    'source',
    'is_decoy',
    'q_value',
    'per_position_scores',
]

# Sayısal çıktı formatı
FLOAT_DECIMALS = 6

# Çıkış kodları
EXIT_SUCCESS = 0
EXIT_FATAL_INPUT = 1
EXIT_INTERNAL = 2

# Hata mesajları
ERROR_MESSAGES = {
    'missing_file': '❌ Dosya bulunamadı',
    'config_error': '❌ Konfigürasyon hatası',
    'parse_error': '❌ Parse hatası',
    'fetch_error': '❌ UniProt indirme hatası',
    'index_error': '❌ Index dosyası geçersiz',
    'internal_error': '❌ Beklenmeyen hata',
}

SUBCOMMANDS = (
    'digest',
    'index',
    'dbsearch',
    'denovo',
    'hybrid',
    'assemble',
    'eval',
    'synth',
)

# Veritabanı gerektiren modlar
DB_MODES = frozenset({'digest', 'index', 'dbsearch', 'hybrid'})

"""
specnova - Configuration Settings
Tüm arama ayarları ve parametreleri

Öncelik sırası: varsayılanlar < config dosyası < ortam değişkenleri (SPECNOVA_ önekli) < komut satırı
"""

import os
import typing
from dataclasses import dataclass, field, fields
from typing import Any, ClassVar, Dict, List, Mapping, Optional

from dotenv import dotenv_values

from config.constants import DB_MODES, WildcardPolicy
from core.exceptions import ConfigError

ENV_PREFIX = 'SPECNOVA_'

_TRUE_VALUES = {'1', 'true', 'yes', 'on'}
_FALSE_VALUES = {'0', 'false', 'no', 'off'}


@dataclass
class ChemConfig:
    """Kütle tablosu ve modifikasyon ayarları"""
    PREFIX: ClassVar[str] = 'CHEM'

    MAX_PEPTIDE_LENGTH: int = 50

    # Sabit: Carbamidomethyl (C), değişken: Oxidation (M), Deamidation (NQ)
    FIXED_MODS: str = 'cam:C'
    VARIABLE_MODS: str = 'ox:M,deam:NQ'
    MAX_VARIABLE_MODS: int = 2

    WILDCARD_POLICY: str = WildcardPolicy.SPLIT.value


@dataclass
class DigestSettings:
    """In silico digestion ayarları"""
    PREFIX: ClassVar[str] = 'DIGEST'

    ENZYME: str = 'trypsin'
    MISSED_CLEAVAGES: int = 2
    MIN_LENGTH: int = 6
    MAX_LENGTH: int = 50
    PROLINE_EXCEPTION: bool = False
    WITH_DECOYS: bool = True


@dataclass
class ScorerConfig:
    """Scorer ayarları"""
    PREFIX: ClassVar[str] = 'SCORER'

    NAME: str = 'ion_evidence'
    FRAGMENT_TOL_DA: float = 0.5
    EPSILON: float = 0.01
    B_WEIGHT: float = 1.0
    Y_WEIGHT: float = 1.0

    # Step dağılımı LRU cache boyutu
    CACHE_SIZE: int = 4096


@dataclass
class SearchSettings:
    """Arama motoru ayarları"""
    PREFIX: ClassVar[str] = 'SEARCH'

    PRECURSOR_PPM: float = 20.0
    BEAM_WIDTH: int = 10
    KNAPSACK_RESOLUTION: float = 0.0005
    TOP_K: int = 2
    FDR_THRESHOLD: float = 0.01


@dataclass
class AssemblyConfig:
    """De Bruijn assembly ayarları"""
    PREFIX: ClassVar[str] = 'ASSEMBLY'

    KMER: int = 6
    MIN_WEIGHT: float = 0.0


@dataclass
class RunConfig:
    """Çalıştırma ayarları - girdi/çıktı yolları ve paralellik"""
    PREFIX: ClassVar[str] = 'RUN'

    MGF: str = ''
    FASTA: str = ''
    TAXONOMY: Optional[int] = None
    OUTPUT: str = ''

    # assemble / eval / synth girdileri
    PSMS: str = ''
    TARGETS: str = ''
    PREDICTIONS: str = ''
    PEPTIDES: str = ''

    INDEX_CACHE: str = ''

    THREADS: int = field(default_factory=lambda: os.cpu_count() or 1)
    BATCH_SIZE: int = 64

    LOG_LEVEL: str = 'INFO'
    LOG_FILE: str = ''


@dataclass
class SynthConfig:
    """Sentetik spektrum üretici ayarları"""
    PREFIX: ClassVar[str] = 'SYNTH'

    CHARGE: int = 2
    ION_KINDS: str = 'b,y'
    NOISE_PEAKS: int = 0
    DROPOUT: float = 0.0
    SEED: int = 0


@dataclass
class UniProtConfig:
    """UniProt REST ayarları"""
    PREFIX: ClassVar[str] = 'UNIPROT'

    ENDPOINT: str = 'https://rest.uniprot.org/uniprotkb/stream'
    REVIEWED_ONLY: bool = True
    CACHE_DIR: str = '.specnova_cache'
    CACHE_TTL: int = 3600
    TIMEOUT: int = 60


@dataclass
class Settings:
    """Tüm konfigürasyon bölümleri"""
    chem: ChemConfig = field(default_factory=ChemConfig)
    digest: DigestSettings = field(default_factory=DigestSettings)
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    search: SearchSettings = field(default_factory=SearchSettings)
    assembly: AssemblyConfig = field(default_factory=AssemblyConfig)
    run: RunConfig = field(default_factory=RunConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    uniprot: UniProtConfig = field(default_factory=UniProtConfig)

    def sections(self) -> List[Any]:
        return [getattr(self, f.name) for f in fields(self)]

    def known_keys(self) -> Dict[str, tuple]:
        """'SEARCH_BEAM_WIDTH' -> (bölüm, alan adı)"""
        keys = {}
        for section in self.sections():
            for f in fields(section):
                keys[f"{section.PREFIX}_{f.name}"] = (section, f.name)
        return keys

    def apply(self, values: Mapping[str, Any], source: str, strict: bool = True) -> None:
        """Bir katmanı (dosya, ortam, flag) uygula"""
        known = self.known_keys()
        for key, raw in values.items():
            normalized = key.strip().upper()
            if normalized not in known:
                if strict:
                    raise ConfigError(f"Bilinmeyen ayar anahtarı ({source}): {key}", key=key)
                continue
            section, name = known[normalized]
            setattr(section, name, _coerce(section, name, raw, normalized))

    def as_dict(self) -> Dict[str, Any]:
        return {key: getattr(section, name) for key, (section, name) in sorted(self.known_keys().items())}


def _coerce(section: Any, name: str, raw: Any, key: str) -> Any:
    """Metin değeri alan tipine çevir"""
    if raw is None:
        return None
    hints = typing.get_type_hints(type(section))
    target = hints[name]
    optional = typing.get_origin(target) is typing.Union and type(None) in typing.get_args(target)
    if optional:
        target = next(arg for arg in typing.get_args(target) if arg is not type(None))
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    if optional and text == '':
        return None
    try:
        if target is bool:
            lowered = text.lower()
            if lowered in _TRUE_VALUES:
                return True
            if lowered in _FALSE_VALUES:
                return False
            raise ValueError(text)
        if target is int:
            return int(text)
        if target is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"{key} için geçersiz değer: {raw!r} ({target.__name__} bekleniyor)", key=key) from None
    return text


def read_config_file(path: str) -> Dict[str, Optional[str]]:
    """KEY=VALUE config dosyasını oku (# ile başlayan satırlar yorum)"""
    if not os.path.exists(path):
        raise ConfigError(f"Config dosyası bulunamadı: {path}", key='--config')
    return dict(dotenv_values(path))


def load_settings(
    config_file: Optional[str] = None,
    environ: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[str, Any]] = None
) -> Settings:
    """Varsayılanlar < dosya < ortam < flag sırasıyla ayarları oluştur"""
    settings = Settings()

    if config_file:
        settings.apply(read_config_file(config_file), source=config_file)

    environ = os.environ if environ is None else environ
    env_values = {
        key[len(ENV_PREFIX):]: value
        for key, value in environ.items()
        if key.startswith(ENV_PREFIX)
    }
    settings.apply(env_values, source='environment', strict=False)

    if overrides:
        settings.apply({k: v for k, v in overrides.items() if v is not None}, source='flags')

    return settings


def validate_config(settings: Settings, mode: Optional[str] = None) -> bool:
    """Konfigürasyonları doğrula - hata varsa ConfigError (ilk sorunlu key ile)"""
    errors: List[tuple] = []

    if mode in DB_MODES:
        has_fasta = bool(settings.run.FASTA)
        has_taxonomy = settings.run.TAXONOMY is not None
        if has_fasta == has_taxonomy:
            errors.append(('RUN_FASTA', "Tam olarak biri gerekli: --fasta veya --taxonomy"))

    if settings.run.TAXONOMY is not None and settings.run.TAXONOMY <= 0:
        errors.append(('RUN_TAXONOMY', "Taxonomy id pozitif olmalı"))

    if settings.search.BEAM_WIDTH < 1:
        errors.append(('SEARCH_BEAM_WIDTH', "Beam genişliği en az 1 olmalı"))
    if settings.search.PRECURSOR_PPM <= 0:
        errors.append(('SEARCH_PRECURSOR_PPM', "Precursor toleransı pozitif olmalı"))
    if settings.search.KNAPSACK_RESOLUTION <= 0:
        errors.append(('SEARCH_KNAPSACK_RESOLUTION', "Knapsack çözünürlüğü pozitif olmalı"))
    if settings.search.TOP_K < 1:
        errors.append(('SEARCH_TOP_K', "top-k en az 1 olmalı"))
    if not 0 <= settings.search.FDR_THRESHOLD <= 1:
        errors.append(('SEARCH_FDR_THRESHOLD', "FDR eşiği [0, 1] aralığında olmalı"))

    if settings.scorer.FRAGMENT_TOL_DA <= 0:
        errors.append(('SCORER_FRAGMENT_TOL_DA', "Fragment toleransı pozitif olmalı"))
    if settings.scorer.EPSILON <= 0:
        errors.append(('SCORER_EPSILON', "Epsilon pozitif olmalı"))
    if settings.scorer.B_WEIGHT < 0 or settings.scorer.Y_WEIGHT < 0 or \
            settings.scorer.B_WEIGHT + settings.scorer.Y_WEIGHT == 0:
        errors.append(('SCORER_B_WEIGHT', "Ağırlıklar negatif olamaz ve ikisi birden 0 olamaz"))

    # Registry döngüsel import'u önlemek için burada
    from core.scorer import available_scorers
    if settings.scorer.NAME not in available_scorers():
        errors.append(('SCORER_NAME', f"Bilinmeyen scorer: {settings.scorer.NAME}"))

    if settings.digest.MIN_LENGTH < 1:
        errors.append(('DIGEST_MIN_LENGTH', "Minimum uzunluk en az 1 olmalı"))
    if settings.digest.MIN_LENGTH > settings.digest.MAX_LENGTH:
        errors.append(('DIGEST_MIN_LENGTH', "min_length > max_length"))
    if settings.digest.MISSED_CLEAVAGES < 0:
        errors.append(('DIGEST_MISSED_CLEAVAGES', "Missed cleavage negatif olamaz"))

    if settings.chem.MAX_PEPTIDE_LENGTH < 1:
        errors.append(('CHEM_MAX_PEPTIDE_LENGTH', "Maksimum peptide uzunluğu en az 1 olmalı"))
    if settings.chem.MAX_VARIABLE_MODS < 0:
        errors.append(('CHEM_MAX_VARIABLE_MODS', "max_var negatif olamaz"))
    if settings.chem.WILDCARD_POLICY not in {p.value for p in WildcardPolicy}:
        errors.append(('CHEM_WILDCARD_POLICY', f"Geçersiz wildcard politikası: {settings.chem.WILDCARD_POLICY}"))

    if settings.assembly.KMER < 3:
        errors.append(('ASSEMBLY_KMER', "k en az 3 olmalı"))
    if settings.assembly.MIN_WEIGHT < 0:
        errors.append(('ASSEMBLY_MIN_WEIGHT', "min_weight negatif olamaz"))

    if settings.run.THREADS < 1:
        errors.append(('RUN_THREADS', "Thread sayısı en az 1 olmalı"))
    if settings.run.BATCH_SIZE < 1:
        errors.append(('RUN_BATCH_SIZE', "Batch boyutu en az 1 olmalı"))

    if settings.synth.CHARGE < 1:
        errors.append(('SYNTH_CHARGE', "Charge en az 1 olmalı"))
    if not 0 <= settings.synth.DROPOUT <= 1:
        errors.append(('SYNTH_DROPOUT', "Dropout [0, 1] aralığında olmalı"))
    if settings.synth.NOISE_PEAKS < 0:
        errors.append(('SYNTH_NOISE_PEAKS', "Gürültü pik sayısı negatif olamaz"))

    if errors:
        message = "; ".join(f"{key}: {text}" for key, text in errors)
        raise ConfigError(f"Konfigürasyon hataları: {message}", key=errors[0][0])

    return True

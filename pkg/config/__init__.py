"""
Config package initialization
"""

from config.settings import (
    Settings,
    ChemConfig,
    DigestSettings,
    ScorerConfig,
    SearchSettings,
    AssemblyConfig,
    RunConfig,
    SynthConfig,
    UniProtConfig,
    load_settings,
    read_config_file,
    validate_config
)

from config.constants import (
    Modification,
    IonType,
    ToleranceUnit,
    Direction,
    PsmSource,
    HybridChoice,
    WildcardPolicy,
    SearchMode,
    PSM_COLUMNS,
    SUBCOMMANDS
)

__all__ = [
    'Settings',
    'ChemConfig',
    'DigestSettings',
    'ScorerConfig',
    'SearchSettings',
    'AssemblyConfig',
    'RunConfig',
    'SynthConfig',
    'UniProtConfig',
    'load_settings',
    'read_config_file',
    'validate_config',
    'Modification',
    'IonType',
    'ToleranceUnit',
    'Direction',
    'PsmSource',
    'HybridChoice',
    'WildcardPolicy',
    'SearchMode',
    'PSM_COLUMNS',
    'SUBCOMMANDS'
]

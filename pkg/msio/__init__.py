"""
msio package initialization
"""

from msio.records import (
    SpectrumRecord,
    ProteinRecord,
    PsmRecord,
    ParseSummary,
    normalize_peaks
)
from msio.mgf import parse_mgf, read_mgf, write_mgf, precursor_neutral_mass
from msio.fasta import parse_fasta, read_fasta
from msio.base_client import BaseProteomeClient
from msio.uniprot_client import UniProtClient, fetch_proteome
from msio.psm_tsv import write_psms, read_psms, write_digest, read_sequences
from msio.contig_fasta import write_contigs

__all__ = [
    'SpectrumRecord',
    'ProteinRecord',
    'PsmRecord',
    'ParseSummary',
    'normalize_peaks',
    'parse_mgf',
    'read_mgf',
    'write_mgf',
    'precursor_neutral_mass',
    'parse_fasta',
    'read_fasta',
    'BaseProteomeClient',
    'UniProtClient',
    'fetch_proteome',
    'write_psms',
    'read_psms',
    'write_digest',
    'read_sequences',
    'write_contigs'
]

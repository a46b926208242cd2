"""
Ortak test fixture'ları
"""

import pytest

from config.constants import IonType
from core.chem import DEFAULT_TABLE, Tolerance
from core.knapsack import build_knapsack
from core.scorer import IonEvidenceParams, IonEvidenceScorer
from utils.synthetic import synth_spectrum

FINE_TOLERANCE = Tolerance.da(0.01)


@pytest.fixture(scope="session")
def fine_scorer():
    """0.01 Da fragment toleranslı ion-evidence scorer"""
    return IonEvidenceScorer(IonEvidenceParams(fragment_tolerance=FINE_TOLERANCE))


@pytest.fixture(scope="session")
def vocabulary_knapsack():
    """Tüm vocabulary kütleleri için 3000 Da'ya kadar knapsack tablosu"""
    masses = [DEFAULT_TABLE.mass(token) for token in DEFAULT_TABLE.tokens]
    return build_knapsack(masses, 3000.0)


@pytest.fixture
def perfect_spectrum():
    """Tüm 1+ b/y iyonlarını içeren sentetik spektrum üretici"""
    def make(sequence, spectrum_id=None, charge=2):
        return synth_spectrum(
            sequence,
            charge=charge,
            kinds=(IonType.B, IonType.Y),
            spectrum_id=spectrum_id or sequence,
        )
    return make

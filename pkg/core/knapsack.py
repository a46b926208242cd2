"""
specnova - Knapsack
Residue kütleleri için ulaşılabilirlik tablosu (de novo kütle budaması)
"""

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from core.exceptions import RejectedInputError
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_RESOLUTION = 0.0005


@dataclass(frozen=True, eq=False)
class KnapsackTable:
    """
    feasible[k]: k·resolution kütlesi residue kütlelerinin bir multiset'i ile ±1 bin içinde oluşturulabilir
    Tablo sound: gerçek bir toplam hiçbir zaman infeasible işaretlenmez
    """
    resolution: float
    max_mass: float
    feasible: np.ndarray
    residue_masses: Tuple[float, ...]

    @property
    def n_bins(self) -> int:
        return int(self.feasible.size)

    def bin_of(self, mass: float) -> int:
        return int(round(mass / self.resolution))

    def is_feasible(self, mass: float, tolerance_da: float = 0.0) -> bool:
        """mass ± tolerance bandındaki herhangi bir bin ulaşılabilir mi"""
        if mass + tolerance_da < 0:
            return False
        lo = max(0, self.bin_of(mass - tolerance_da))
        hi = self.bin_of(mass + tolerance_da)
        if lo >= self.n_bins:
            # Tablo dışı: budama yapılamaz
            return True
        hi = min(hi, self.n_bins - 1)
        return bool(self.feasible[lo:hi + 1].any())


def build_knapsack(
    residue_masses: Iterable[float],
    max_mass: float,
    resolution: float = DEFAULT_RESOLUTION
) -> KnapsackTable:
    """
    Sınırsız knapsack ulaşılabilirliği: feasible[k] |= feasible[k - u ± 1], u = round(m / resolution)
    Her residue için (u - 1) boyutlu bloklar halinde numpy ile işlenir
    """
    if resolution <= 0:
        raise RejectedInputError(f"Knapsack çözünürlüğü pozitif olmalı: {resolution}")
    if max_mass <= 0:
        raise RejectedInputError(f"max_mass pozitif olmalı: {max_mass}")

    masses = tuple(sorted(set(float(m) for m in residue_masses)))
    if not masses or masses[0] <= 0:
        raise RejectedInputError("Residue kütleleri pozitif ve boş olmayan bir küme olmalı")

    n_bins = int(round(max_mass / resolution)) + 2
    table = np.zeros(n_bins, dtype=bool)
    table[0] = True

    for mass in masses:
        unit = int(round(mass / resolution))
        if unit < 2:
            raise RejectedInputError(f"Residue kütlesi ({mass}) çözünürlüğe ({resolution}) göre çok küçük")
        block = unit - 1
        # Kaynak k - shift her zaman bloğun başından önce - blok içi bağımlılık yok
        for start in range(block, n_bins, block):
            stop = min(start + block, n_bins)
            for shift in (unit - 1, unit, unit + 1):
                lo = max(start, shift)
                if lo < stop:
                    table[lo:stop] |= table[lo - shift:stop - shift]

    table.setflags(write=False)
    logger.info(
        f"✅ Knapsack tablosu: {len(masses)} residue kütlesi, {max_mass:.2f} Da, "
        f"{n_bins} bin ({table.sum()} ulaşılabilir)"
    )
    return KnapsackTable(resolution=resolution, max_mass=max_mass, feasible=table, residue_masses=masses)

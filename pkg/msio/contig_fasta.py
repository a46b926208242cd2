"""
specnova - Contig FASTA
Assembly contig'lerini FASTA olarak yaz
"""

from typing import IO, Iterable

from utils.helpers import format_float

LINE_WIDTH = 60


def contig_header(number: int, contig) -> str:
    header = (
        f">contig_{number} len={len(contig.sequence)} "
        f"mean_weight={format_float(contig.mean_weight)} support={len(contig.support)}"
    )
    if contig.is_cycle:
        header += " cycle=true"
    return header


def write_contigs(contigs: Iterable, stream: IO[str]) -> int:
    """Contig'leri sırayla contig_1, contig_2 ... olarak yaz"""
    count = 0
    for count, contig in enumerate(contigs, start=1):
        stream.write(contig_header(count, contig) + "\n")
        for start in range(0, len(contig.sequence), LINE_WIDTH):
            stream.write(contig.sequence[start:start + LINE_WIDTH] + "\n")
    return count

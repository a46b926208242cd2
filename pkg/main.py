"""
specnova - Main Entry Point
Komut satırı: specnova <digest|index|dbsearch|denovo|hybrid|assemble|eval|synth> [--config FILE] [flags]
"""

import argparse
import contextlib
import os
import sys
from typing import Any, Dict, IO, Iterator, List, Optional, Sequence

import pandas as pd

from config.constants import (
    ERROR_MESSAGES,
    EXIT_FATAL_INPUT,
    EXIT_INTERNAL,
    EXIT_SUCCESS,
    SUBCOMMANDS,
    IonType,
    SearchMode,
    WildcardPolicy,
)
from config.settings import Settings, load_settings, validate_config
from core.assembly import build_graph, extract_contigs, peptide_confidence
from core.chem import Tolerance
from core.digest import DigestConfig, digest_all, get_enzyme
from core.exceptions import (
    ConfigError,
    FetchError,
    IndexFormatError,
    ParseError,
    RejectedInputError,
)
from core.massindex import MassIndex, ModificationConfig, build_index
from core.scorer import IonEvidenceParams, get_scorer
from core.search import SearchConfig
from core.searcher import SpectrumSearcher, apply_fdr
from database.index_store import IndexStore
from msio.contig_fasta import write_contigs
from msio.fasta import read_fasta
from msio.mgf import read_mgf, write_mgf
from msio.psm_tsv import read_psms, read_sequences, write_digest, write_psms
from msio.uniprot_client import UniProtClient
from reports.evaluation import evaluate, load_eval_pairs, write_eval_report
from utils.cache import CacheManager
from utils.logger import get_logger, setup_logger
from utils.performance import PerformanceMonitor
from utils.synthetic import synth_spectra

logger = get_logger(__name__)

# Flag -> ayar anahtarı
FLAG_KEYS = {
    '--mgf': 'RUN_MGF',
    '--fasta': 'RUN_FASTA',
    '--taxonomy': 'RUN_TAXONOMY',
    '--output': 'RUN_OUTPUT',
    '--psms': 'RUN_PSMS',
    '--targets': 'RUN_TARGETS',
    '--predictions': 'RUN_PREDICTIONS',
    '--peptides': 'RUN_PEPTIDES',
    '--index-cache': 'RUN_INDEX_CACHE',
    '--threads': 'RUN_THREADS',
    '--batch-size': 'RUN_BATCH_SIZE',
    '--log-level': 'RUN_LOG_LEVEL',
    '--log-file': 'RUN_LOG_FILE',
    '--enzyme': 'DIGEST_ENZYME',
    '--missed-cleavages': 'DIGEST_MISSED_CLEAVAGES',
    '--min-length': 'DIGEST_MIN_LENGTH',
    '--max-length': 'DIGEST_MAX_LENGTH',
    '--fixed-mods': 'CHEM_FIXED_MODS',
    '--var-mods': 'CHEM_VARIABLE_MODS',
    '--max-var-mods': 'CHEM_MAX_VARIABLE_MODS',
    '--wildcard-policy': 'CHEM_WILDCARD_POLICY',
    '--scorer': 'SCORER_NAME',
    '--fragment-tol-da': 'SCORER_FRAGMENT_TOL_DA',
    '--precursor-ppm': 'SEARCH_PRECURSOR_PPM',
    '--beam': 'SEARCH_BEAM_WIDTH',
    '--top-k': 'SEARCH_TOP_K',
    '--fdr': 'SEARCH_FDR_THRESHOLD',
    '--kmer': 'ASSEMBLY_KMER',
    '--min-weight': 'ASSEMBLY_MIN_WEIGHT',
    '--charge': 'SYNTH_CHARGE',
    '--ion-kinds': 'SYNTH_ION_KINDS',
    '--noise-peaks': 'SYNTH_NOISE_PEAKS',
    '--dropout': 'SYNTH_DROPOUT',
    '--seed': 'SYNTH_SEED',
}

SUBCOMMAND_HELP = {
    'digest': 'FASTA -> peptide TSV',
    'index': 'Mass index oluştur ve cache dosyasına yaz',
    'dbsearch': 'MGF + index -> PSM TSV (q-value ile)',
    'denovo': 'MGF -> de novo PSM TSV',
    'hybrid': 'MGF + index -> hybrid PSM TSV',
    'assemble': 'PSM TSV -> contig FASTA',
    'eval': 'Target ve tahmin tablolarından recall raporu',
    'synth': 'Peptide listesi -> sentetik MGF',
}


def build_parser() -> argparse.ArgumentParser:
    """Alt komutlar ve ortak flag'ler"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', dest='config_file', metavar='FILE', help='KEY=VALUE config dosyası')
    for flag, key in FLAG_KEYS.items():
        common.add_argument(flag, dest=key, metavar=key, default=None)

    parser = argparse.ArgumentParser(
        prog='specnova',
        description='Peptide tanımlama motoru: veritabanı araması, de novo, hybrid, FDR ve assembly',
    )
    subparsers = parser.add_subparsers(dest='subcommand', metavar='{' + ','.join(SUBCOMMANDS) + '}')
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common], help=SUBCOMMAND_HELP[name])
    return parser


@contextlib.contextmanager
def open_output(path: str) -> Iterator[IO[str]]:
    """Boş yol -> stdout (veri çıktısı), aksi halde dosya"""
    if not path:
        yield sys.stdout
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        yield handle


def _require(value: Any, key: str, subcommand: str) -> Any:
    if value in (None, ''):
        raise ConfigError(f"'{subcommand}' için {key} gerekli", key=key)
    return value


class SpecnovaApplication:
    """Ana uygulama sınıfı - alt komutları çalıştırır"""

    def __init__(self, settings: Settings):
        self.settings = settings
        self.performance_monitor = PerformanceMonitor()

    # ------------------------------------------------------------------
    # Ortak bileşenler
    # ------------------------------------------------------------------

    def digest_config(self) -> DigestConfig:
        digest = self.settings.digest
        return DigestConfig(
            max_missed_cleavages=digest.MISSED_CLEAVAGES,
            min_length=digest.MIN_LENGTH,
            max_length=min(digest.MAX_LENGTH, self.settings.chem.MAX_PEPTIDE_LENGTH),
        )

    def modification_config(self) -> ModificationConfig:
        chem = self.settings.chem
        return ModificationConfig.from_strings(chem.FIXED_MODS, chem.VARIABLE_MODS, chem.MAX_VARIABLE_MODS)

    def index_params(self) -> Dict[str, Any]:
        """Index cache'inin geçerliliğini belirleyen parametreler"""
        run, digest, chem = self.settings.run, self.settings.digest, self.settings.chem
        source = f"fasta:{os.path.abspath(run.FASTA)}" if run.FASTA else f"taxonomy:{run.TAXONOMY}"
        return {
            'source': source,
            'reviewed_only': self.settings.uniprot.REVIEWED_ONLY,
            'enzyme': digest.ENZYME,
            'proline_exception': digest.PROLINE_EXCEPTION,
            'missed_cleavages': digest.MISSED_CLEAVAGES,
            'min_length': digest.MIN_LENGTH,
            'max_length': min(digest.MAX_LENGTH, chem.MAX_PEPTIDE_LENGTH),
            'fixed_mods': chem.FIXED_MODS,
            'variable_mods': chem.VARIABLE_MODS,
            'max_variable_mods': chem.MAX_VARIABLE_MODS,
            'with_decoys': digest.WITH_DECOYS,
            'wildcard_policy': chem.WILDCARD_POLICY,
        }

    def load_proteins(self) -> List:
        """FASTA dosyası veya UniProt taxonomy'sinden proteinler"""
        run = self.settings.run
        policy = WildcardPolicy(self.settings.chem.WILDCARD_POLICY)

        if run.FASTA:
            proteins, summary = read_fasta(run.FASTA, policy)
            if summary.n_errors:
                logger.warning(f"⚠️ {run.FASTA}: {summary.n_errors} hatalı kayıt atlandı")
        else:
            uniprot = self.settings.uniprot
            client = UniProtClient(
                endpoint=uniprot.ENDPOINT,
                cache=CacheManager(uniprot.CACHE_DIR, ttl=uniprot.CACHE_TTL),
                timeout=uniprot.TIMEOUT,
            )
            try:
                proteins = client.fetch_proteome(run.TAXONOMY, uniprot.REVIEWED_ONLY, policy)
            finally:
                client.close()

        if not proteins:
            logger.warning("⚠️ Hiç protein yüklenmedi")
        return proteins

    def build_mass_index(self) -> MassIndex:
        digest = self.settings.digest
        return build_index(
            self.load_proteins(),
            get_enzyme(digest.ENZYME, digest.PROLINE_EXCEPTION),
            self.digest_config(),
            self.modification_config(),
            with_decoys=digest.WITH_DECOYS,
        )

    def get_index(self) -> MassIndex:
        """Index cache'i geçerliyse yükle, değilse oluştur ve kaydet"""
        cache_path = self.settings.run.INDEX_CACHE
        params = self.index_params()

        if cache_path and os.path.exists(cache_path):
            try:
                index, cached_params = IndexStore.load(cache_path)
                if cached_params == params:
                    return index
                logger.warning("⚠️ Index cache parametreleri farklı - yeniden oluşturuluyor")
            except IndexFormatError as e:
                logger.warning(f"⚠️ Index cache kullanılamadı ({e}) - yeniden oluşturuluyor")

        index = self.build_mass_index()
        if cache_path:
            IndexStore.save(index, cache_path, params)
        return index

    def scorer(self):
        cfg = self.settings.scorer
        params = IonEvidenceParams(
            fragment_tolerance=Tolerance.da(cfg.FRAGMENT_TOL_DA),
            smoothing_epsilon=cfg.EPSILON,
            b_weight=cfg.B_WEIGHT,
            y_weight=cfg.Y_WEIGHT,
            end_mass_tolerance=Tolerance.ppm(self.settings.search.PRECURSOR_PPM),
        )
        return get_scorer(cfg.NAME, params, cache_size=cfg.CACHE_SIZE)

    def search_config(self) -> SearchConfig:
        search = self.settings.search
        return SearchConfig(
            precursor_tolerance=Tolerance.ppm(search.PRECURSOR_PPM),
            beam_width=search.BEAM_WIDTH,
            max_length=self.settings.chem.MAX_PEPTIDE_LENGTH,
            knapsack_resolution=search.KNAPSACK_RESOLUTION,
            fdr_threshold=search.FDR_THRESHOLD,
            top_k=search.TOP_K,
        )

    # ------------------------------------------------------------------
    # Alt komutlar
    # ------------------------------------------------------------------

    def run_digest(self) -> int:
        digest = self.settings.digest
        rows = digest_all(
            self.load_proteins(),
            get_enzyme(digest.ENZYME, digest.PROLINE_EXCEPTION),
            self.digest_config(),
        )
        with open_output(self.settings.run.OUTPUT) as stream:
            write_digest(rows, stream)
        return EXIT_SUCCESS

    def run_index(self) -> int:
        run = self.settings.run
        path = run.INDEX_CACHE or _require(run.OUTPUT, 'RUN_INDEX_CACHE', 'index')
        index = self.build_mass_index()
        IndexStore.save(index, path, self.index_params())
        return EXIT_SUCCESS

    def run_search(self, mode: SearchMode) -> int:
        run = self.settings.run
        spectra, summary = read_mgf(_require(run.MGF, 'RUN_MGF', mode.value))
        if summary.n_errors:
            logger.warning(f"⚠️ {summary.n_errors} MGF bloğu atlandı")

        index = self.get_index() if mode is not SearchMode.DENOVO else None
        searcher = SpectrumSearcher(
            mode,
            self.scorer(),
            self.search_config(),
            index=index,
            threads=run.THREADS,
            batch_size=run.BATCH_SIZE,
            monitor=self.performance_monitor,
        )
        result = searcher.run(spectra)
        psms = apply_fdr(result, self.settings.search.FDR_THRESHOLD)

        with open_output(run.OUTPUT) as stream:
            write_psms(psms, stream)

        self.performance_monitor.log_summary()
        if result.failed:
            logger.error(f"❌ {result.n_errors} spektrum aranamadı: {', '.join(result.failed[:10])}")
            return EXIT_INTERNAL
        return EXIT_SUCCESS

    def run_assemble(self) -> int:
        run = self.settings.run
        threshold = self.settings.search.FDR_THRESHOLD
        psms = read_psms(_require(run.PSMS, 'RUN_PSMS', 'assemble'))

        accepted = [
            psm for psm in psms
            if psm.rank == 1 and not psm.is_decoy and (psm.q_value is None or psm.q_value <= threshold)
        ]
        logger.info(f"📊 Assembly: {len(accepted)}/{len(psms)} PSM kabul edildi")

        graph = build_graph(
            [(psm.sequence, peptide_confidence(psm.score)) for psm in accepted],
            k=self.settings.assembly.KMER,
            ids=[psm.spectrum_id for psm in accepted],
        )
        contigs = extract_contigs(graph, self.settings.assembly.MIN_WEIGHT)
        with open_output(run.OUTPUT) as stream:
            write_contigs(contigs, stream)
        return EXIT_SUCCESS

    def run_eval(self) -> int:
        run = self.settings.run
        pairs = load_eval_pairs(
            _require(run.TARGETS, 'RUN_TARGETS', 'eval'),
            _require(run.PREDICTIONS, 'RUN_PREDICTIONS', 'eval'),
        )
        report = evaluate(pairs, Tolerance.da(self.settings.scorer.FRAGMENT_TOL_DA))
        with open_output(run.OUTPUT) as stream:
            write_eval_report(report, stream)
        print(report.summary(), file=sys.stderr)
        return EXIT_SUCCESS

    def run_synth(self) -> int:
        run, synth = self.settings.run, self.settings.synth
        peptides = [p for p in read_sequences(_require(run.PEPTIDES, 'RUN_PEPTIDES', 'synth')) if p]
        try:
            kinds = tuple(IonType(kind.strip()) for kind in synth.ION_KINDS.split(',') if kind.strip())
        except ValueError:
            raise ConfigError(f"Geçersiz iyon türü: {synth.ION_KINDS}", key='SYNTH_ION_KINDS') from None

        spectra = synth_spectra(
            peptides,
            charge=synth.CHARGE,
            kinds=kinds,
            noise_peaks=synth.NOISE_PEAKS,
            dropout=synth.DROPOUT,
            seed=synth.SEED,
        )
        with open_output(run.OUTPUT) as stream:
            write_mgf(spectra, stream)

        if run.TARGETS:
            # hedef tablosu yalnızca MGF'e yazılan spektrumları içerir
            written = [(s.id, peptide) for s, peptide in zip(spectra, peptides) if s.peaks]
            frame = pd.DataFrame(written, columns=['spectrum_id', 'sequence'])
            with open_output(run.TARGETS) as stream:
                frame.to_csv(stream, sep='\t', index=False, lineterminator='\n')
        return EXIT_SUCCESS

    def run(self, subcommand: str) -> int:
        handlers = {
            'digest': self.run_digest,
            'index': self.run_index,
            'dbsearch': lambda: self.run_search(SearchMode.DB),
            'denovo': lambda: self.run_search(SearchMode.DENOVO),
            'hybrid': lambda: self.run_search(SearchMode.HYBRID),
            'assemble': self.run_assemble,
            'eval': self.run_eval,
            'synth': self.run_synth,
        }
        logger.info(f"🚀 specnova {subcommand} başlatılıyor...")
        return handlers[subcommand]()


def run(subcommand: str, settings: Settings) -> int:
    """Doğrulanmış config ile alt komutu çalıştır"""
    validate_config(settings, subcommand)
    return SpecnovaApplication(settings).run(subcommand)


def main(argv: Optional[Sequence[str]] = None, environ: Optional[Dict[str, str]] = None) -> int:
    """Ana fonksiyon - çıkış kodu döner"""
    setup_logger()
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_SUCCESS if e.code in (0, None) else EXIT_FATAL_INPUT

    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return EXIT_FATAL_INPUT

    overrides = {key: getattr(args, key) for key in FLAG_KEYS.values()}
    try:
        settings = load_settings(args.config_file, environ=environ, overrides=overrides)
        setup_logger(settings.run.LOG_LEVEL, settings.run.LOG_FILE or None)
        return run(args.subcommand, settings)

    except ConfigError as e:
        logger.error(f"{ERROR_MESSAGES['config_error']} [{e.key}]: {e}")
    except FileNotFoundError as e:
        logger.error(f"{ERROR_MESSAGES['missing_file']}: {e.filename or e}")
    except ParseError as e:
        logger.error(f"{ERROR_MESSAGES['parse_error']}: {e}")
    except FetchError as e:
        logger.error(f"{ERROR_MESSAGES['fetch_error']}: {e}")
    except IndexFormatError as e:
        logger.error(f"{ERROR_MESSAGES['index_error']}: {e}")
    except RejectedInputError as e:
        logger.error(f"❌ Geçersiz girdi: {e}")
    except KeyboardInterrupt:
        logger.info("⌨️ KeyboardInterrupt alındı")
        return EXIT_INTERNAL
    except Exception as e:
        logger.error(f"{ERROR_MESSAGES['internal_error']}: {e}", exc_info=True)
        return EXIT_INTERNAL

    return EXIT_FATAL_INPUT


if __name__ == "__main__":
    sys.exit(main())

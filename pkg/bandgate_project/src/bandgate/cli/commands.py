"""
Command-line interface: gen, train, sweep, report and verify.

Results go to stdout, logs to stderr. Option values resolve as built-in
defaults < --preset < --config file < command-line flags.
"""

import functools
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click

from ..config.constants import CONCRETE_INITS, EXIT_CODES, METHODS, OPTIMIZERS
from ..config.settings import settings
from ..core.exceptions import BandGateException, ConfigurationError, DatasetError, ReportError
from ..core.logging_config import get_logger, setup_logging
from ..data.io import load_csv, save_csv
from ..data.synthetic import SyntheticSpec, generate
from ..evaluation.bands_curve import bands_auc, selection_stability
from ..evaluation.reports import mean_curves, read_metric_csv, read_selection_csv, write_progression_csv
from ..selection.band_selection import BandSelection
from ..training.config import PRESETS, TrainConfig, from_mapping, load_config_file, preset
from ..training.trainer import train
from ..verification.harness import VerificationHarness, format_tap, write_outcomes_csv
from .svg_chart import write_bands_chart
from .sweep import SweepSpec, run_sweep

logger = get_logger(__name__)

COMMANDS = ('gen', 'train', 'sweep', 'report', 'verify')

# config-file keys whose click parameter is named differently
CONFIG_FILE_RENAMES = {'data': 'data_path', 'preset': 'preset_name', 'sweep': 'sweep_path'}

# Click parameter names that map onto TrainConfig fields
TRAIN_FIELDS = (
    'epochs', 'batch_size', 'learning_rate', 'optimizer', 'tau0', 'alpha', 'beta', 'init', 'prior_bands',
    'sigma', 'mu0', 'lambda0', 'phase2_epochs', 'hidden', 'weighted_loss', 'standardize',
    'validation_fraction', 'seed',
)


def parse_int_list(text: str) -> List[int]:
    """'2,4,6' or '2..10' (inclusive range) or a mix of both."""
    values: List[int] = []
    for part in (p.strip() for p in text.split(',')):
        if not part:
            continue
        if '..' in part:
            low, high = part.split('..', 1)
            values.extend(range(int(low), int(high) + 1))
        else:
            values.append(int(part))
    return values


def _int_list(ctx, param, value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return parse_int_list(value)
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def handle_errors(func: Callable) -> Callable:
    """Map library exceptions onto exit codes: input problems 2, everything else 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ConfigurationError, DatasetError, ReportError) as e:
            logger.error("invalid_input", command=func.__name__, error=str(e))
            raise click.UsageError(str(e))
        except BandGateException as e:
            logger.error("command_failed", command=func.__name__, error=str(e))
            raise click.ClickException(str(e))

    return wrapper


def train_options(func: Callable) -> Callable:
    """Options shared by train and sweep; unset options fall back to the preset."""
    options = [
        click.option('--data', 'data_path', required=True, type=click.Path(exists=True, dir_okay=False),
                     help='Dataset CSV'),
        click.option('--preset', 'preset_name', type=click.Choice(sorted(PRESETS)), default=None,
                     help='Reported hyperparameter preset'),
        click.option('--epochs', type=int, default=None),
        click.option('--batch-size', type=int, default=None),
        click.option('--lr', 'learning_rate', type=float, default=None, help='Learning rate'),
        click.option('--optimizer', type=click.Choice(OPTIMIZERS), default=None),
        click.option('--tau', 'tau0', type=float, default=None, help='Initial concrete temperature'),
        click.option('--alpha', type=float, default=None, help='Per-batch temperature decay'),
        click.option('--beta', type=float, default=None, help='Gumbel uniform range (0, beta)'),
        click.option('--init', type=click.Choice(CONCRETE_INITS), default=None, help='Concrete logits init'),
        click.option('--prior-bands', type=str, default=None, help='Bands for seeded init, e.g. 3,11,19'),
        click.option('--sigma', type=float, default=None, help='Gate noise std'),
        click.option('--mu0', type=float, default=None, help='Initial gate mean'),
        click.option('--lambda0', type=float, default=None, help='Base regularization weight'),
        click.option('--phase2-epochs', type=int, default=None, help='Gate fine-tuning epochs'),
        click.option('--hidden', type=str, default=None, help='Hidden widths, e.g. 64,32'),
        click.option('--weighted-loss/--no-weighted-loss', default=None),
        click.option('--standardize/--no-standardize', default=None),
        click.option('--validation-fraction', type=float, default=None),
        click.option('--seed', type=int, default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(params: Dict[str, Any], **fixed) -> TrainConfig:
    base = preset(params['preset_name']) if params.get('preset_name') else TrainConfig()
    values = {name: params.get(name) for name in TRAIN_FIELDS}
    values.update(fixed)
    return from_mapping(values, base=base)


@click.group()
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='key=value file supplying option defaults for every command')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              default=None, help='Override LOG_LEVEL')
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], log_level: Optional[str]):
    """Embedded hyperspectral band selection: generate, train, sweep, report, verify."""
    if log_level:
        setup_logging(log_level=log_level, log_file_path=settings.LOG_FILE_PATH or None,
                      enable_structured=settings.LOG_FORMAT == "json")
    if config_path:
        try:
            entries = load_config_file(config_path)
        except ConfigurationError as e:
            raise click.UsageError(str(e))
        entries = {CONFIG_FILE_RENAMES.get(key, key): value for key, value in entries.items()}
        ctx.default_map = {name: dict(entries) for name in COMMANDS}
        logger.info("config_file_loaded", path=config_path, keys=sorted(entries))


@cli.command()
@click.option('--bands', type=int, default=30, show_default=True)
@click.option('--classes', type=int, default=4, show_default=True)
@click.option('--samples', type=int, default=1000, show_default=True)
@click.option('--informative', type=str, default='', help='Planted band indices, e.g. 3,11,19,27')
@click.option('--gap', type=float, default=1.0, show_default=True, help='Class level separation')
@click.option('--noise', type=float, default=0.1, show_default=True, help='Additive noise std')
@click.option('--correlation-width', type=int, default=0, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', required=True, type=click.Path(dir_okay=False), help='Output CSV')
@handle_errors
def gen(bands, classes, samples, informative, gap, noise, correlation_width, seed, out):
    """Generate a synthetic planted-band dataset."""
    planted = _int_list(None, None, informative) or []
    spec = SyntheticSpec(
        n_bands=bands, n_classes=classes, samples=samples, informative=tuple(planted),
        class_signature_gap=gap, noise_std=noise, correlation_width=correlation_width, seed=seed,
    )
    data = generate(spec)
    try:
        save_csv(data, out)
    except OSError as e:
        raise click.ClickException(f"cannot write {out}: {e}")
    click.echo(f"bands={data.n_bands} samples={data.n_samples} classes={data.n_classes} "
               f"informative={','.join(str(b) for b in spec.informative)}")


@cli.command(name='train')
@click.option('--method', type=click.Choice(METHODS), default=None)
@click.option('--k', type=int, default=None, help='Target band count')
@train_options
@click.option('--out-dir', type=click.Path(file_okay=False), default=None,
              help='Directory for progression CSV and checkpoint')
@click.option('--echo-config', is_flag=True, default=False, help='Print the resolved configuration')
@handle_errors
def train_command(method, k, out_dir, echo_config, **params):
    """Train one selector and classifier; prints the selected bands."""
    config = build_config(params, method=method, k=k)
    data = load_csv(params['data_path'])
    config.validate(data.n_bands, data.n_classes)
    if echo_config:
        for key, value in config.to_dict().items():
            click.echo(f"{key}={value}")

    result = train(config, data)
    out = Path(out_dir) if out_dir else settings.OUTPUT_ROOT
    settings.ensure_directory(out)
    write_progression_csv(result.report.epochs, out / 'progression.csv')
    result.classifier.save(out / 'classifier.bgnet')

    click.echo(f"selected_bands={result.selection.joined(',')}")
    click.echo(f"val_oa={result.report.epochs[-1].val_oa:.6f}")
    if result.report.collapsed:
        click.echo(f"distinct_bands={result.selection.k}")


@cli.command()
@click.option('--methods', type=str, default='chbs,random-k', show_default=True)
@click.option('--ks', type=str, default='2..10', show_default=True, help="k values, e.g. 2,4,6 or 2..10")
@click.option('--folds', type=int, default=10, show_default=True)
@train_options
@click.option('--out', required=True, type=click.Path(dir_okay=False), help='Sweep metric CSV')
@click.option('--selections-out', type=click.Path(dir_okay=False), default=None)
@click.option('--workers', type=int, default=None, help='Worker cap (default BANDGATE_THREADS)')
@handle_errors
def sweep(methods, ks, folds, out, selections_out, workers, **params):
    """k-fold cross-validation over methods and band counts."""
    method_list = tuple(m.strip() for m in methods.split(',') if m.strip())
    k_list = _int_list(None, None, ks)
    spec = SweepSpec(
        methods=method_list,
        ks=tuple(k_list or ()),
        folds=folds,
        base=build_config(params),
        out=Path(out),
        selections_out=Path(selections_out) if selections_out else None,
    )
    data = load_csv(params['data_path'])
    result = run_sweep(spec, data, max_workers=workers)
    click.echo("method,bands_auc")
    for method, value in sorted(result.aucs.items()):
        click.echo(f"{method},{value:.6f}")


def _stability_by_method(selections_path: Path) -> Dict[str, float]:
    frame = read_selection_csv(selections_path)
    per_method: Dict[str, List[float]] = {}
    for (method, fold), group in frame.groupby(['method', 'fold'], sort=True):
        picks = {int(row.k): BandSelection.from_indices(int(b) for b in row.selected_bands.split(';') if b)
                 for row in group.itertuples()}
        if len(picks) >= 2:
            per_method.setdefault(method, []).append(selection_stability(picks))
    return {method: sum(values) / len(values) for method, values in per_method.items()}


@cli.command()
@click.option('--sweep', 'sweep_path', required=True, type=click.Path(dir_okay=False), help='Sweep metric CSV')
@click.option('--out', required=True, type=click.Path(dir_okay=False), help='Output SVG')
@click.option('--metric', default='oa', show_default=True)
@click.option('--title', default='Score vs. selected bands', show_default=True)
@handle_errors
def report(sweep_path, out, metric, title):
    """Plot score against k per method and print the bands AUC table."""
    frame = read_metric_csv(sweep_path)
    curves = mean_curves(frame, metric=metric)
    aucs = {method: bands_auc(curve) for method, curve in curves.items() if len(curve) >= 2}
    write_bands_chart(out, curves, aucs, title=title, y_label=metric)

    stability: Dict[str, float] = {}
    sweep_file = Path(sweep_path)
    selections_path = sweep_file.with_name(f"{sweep_file.stem}_selections{sweep_file.suffix or '.csv'}")
    if selections_path.is_file():
        stability = _stability_by_method(selections_path)

    click.echo("method,bands_auc" + (",selection_stability" if stability else ""))
    for method in sorted(curves):
        auc = f"{aucs[method]:.6f}" if method in aucs else "nan"
        line = f"{method},{auc}"
        if stability:
            line += f",{stability[method]:.6f}" if method in stability else ",nan"
        click.echo(line)
    logger.info("report_written", path=str(out), methods=sorted(curves))


@cli.command()
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='CSV of measured quantities')
@click.option('--experiments/--no-experiments', default=False, show_default=True,
              help='Also run the recovery and collapse training experiments')
@click.option('--seeds', type=int, default=10, show_default=True)
@click.option('--workers', type=int, default=None)
@click.pass_context
@handle_errors
def verify(ctx, out, experiments, seeds, workers):
    """Run the verification checks; TAP on stdout."""
    harness = VerificationHarness(seeds=range(seeds), include_experiments=experiments, max_workers=workers)
    outcomes = harness.run()
    csv_path = Path(out) if out else settings.OUTPUT_ROOT / 'verification.csv'
    write_outcomes_csv(outcomes, csv_path)
    click.echo(format_tap(outcomes), nl=False)
    if not all(o.passed for o in outcomes):
        ctx.exit(EXIT_CODES['RUNTIME_FAILURE'])


def main() -> None:
    cli(prog_name='bandgate')


if __name__ == '__main__':
    main()

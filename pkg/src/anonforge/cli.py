"""Command-line surface: batch anonymization, sweeps, evaluation, the HTTP
server, hierarchy validation, and session replay.

Every subcommand exits nonzero on failure with the machine-readable error
code on stderr. Options can also be set via ANONFORGE_* environment
variables (e.g. ANONFORGE_SERVE_PORT).
"""

from __future__ import annotations

import functools
import json
import sys

import click

from .dataset import (
    Dataset,
    load_adult_csv,
    load_csv,
    load_schema,
    sample_rows,
)
from .errors import AnonforgeError
from .evaluation import ClassifierSpec, cross_validate
from .hierarchy import load_hierarchy, load_hierarchy_dir, validate_against
from .pipeline import config_from_json, emit_report, run_sweep
from .session import parse_action_log, replay
from .weights import WeightVector, equal_weights

CONTEXT = dict(auto_envvar_prefix="ANONFORGE", help_option_names=["-h", "--help"])


def _fail_on_error(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except AnonforgeError as exc:
            click.echo(f"{exc.error_code}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load_dataset(data, schema, adult, complete_only, sample_n, sample_seed) -> Dataset:
    with open(data, "rb") as fh:
        if adult:
            d = load_adult_csv(fh, complete_only=complete_only)
        else:
            d = load_csv(fh, load_schema(schema), complete_only=complete_only)
    if sample_n:
        d = sample_rows(d, sample_n, sample_seed)
    return d


def _load_trees(trees_dir: str, d: Dataset) -> dict:
    cats = [a.name for a in d.schema
            if a.role == "quasi_identifier" and a.kind == "categorical"]
    return load_hierarchy_dir(trees_dir, cats)


def _resolve_weights(spec: str, d: Dataset, trees, k: int, session_m: int) -> WeightVector:
    if spec == "equal":
        return equal_weights(d.qi_names())
    if spec.startswith("session:"):
        from .session import Session

        log_path = spec[len("session:"):]
        with open(log_path, encoding="utf-8") as fh:
            actions = parse_action_log(fh.read())
        s = Session(d, trees, k, equal_weights(d.qi_names()), m=session_m)
        for action in actions:
            if action.kind == "choice":
                s.choose(action.payload["record"])
            elif action.kind == "set_weights":
                s.set_weights(action.payload["sliders"])
            elif action.kind == "autopilot":
                s.autopilot()
        return s.weights
    with open(spec, encoding="utf-8") as fh:
        return WeightVector.normalized(json.load(fh))


dataset_options = [
    click.option("--data", required=True, type=click.Path(exists=True),
                 help="input CSV (header row required)"),
    click.option("--schema", type=click.Path(exists=True),
                 help="schema JSON ({attributes: [{name,kind,role}]})"),
    click.option("--adult", is_flag=True,
                 help="treat input as a raw 15-column Adult CSV and preprocess it"),
    click.option("--complete-only", is_flag=True, help="drop rows with missing cells"),
    click.option("--sample-n", type=int, default=0, help="keep only n rows"),
    click.option("--sample-seed", type=int, default=0,
                 help="0 = first n rows, otherwise seeded uniform sample"),
]


def _with_dataset_options(fn):
    for opt in reversed(dataset_options):
        fn = opt(fn)
    return fn


def _require_schema_or_adult(schema, adult):
    if not adult and not schema:
        raise AnonforgeError("--schema is required unless --adult is given")


@click.group(context_settings=CONTEXT)
def main():
    """anonforge: interactive k-anonymization workbench."""


@main.command()
@_with_dataset_options
@click.option("--trees", required=True, type=click.Path(exists=True),
              help="directory of <attribute>.json hierarchy files")
@click.option("--k", required=True, type=int)
@click.option("--weights", default="equal", show_default=True,
              help="'equal', a weights JSON file, or session:<log-file>")
@click.option("--session-m", type=int, default=3,
              help="candidates per round when replaying session weights")
@click.option("--out", required=True, type=click.Path(), help="output CSV path")
@_fail_on_error
def anonymize(data, schema, adult, complete_only, sample_n, sample_seed,
              trees, k, weights, session_m, out):
    """Produce a k-anonymous CSV."""
    from .anonymizer import export, sangreea, total_gil

    _require_schema_or_adult(schema, adult)
    d = _load_dataset(data, schema, adult, complete_only, sample_n, sample_seed)
    hset = _load_trees(trees, d)
    wv = _resolve_weights(weights, d, hset, k, session_m)
    a = sangreea(d, k, hset, wv)
    text = export(a)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    gil = total_gil(a, d, hset, wv)
    click.echo(f"wrote {out}: {len(d)} rows, {len(a.clusters)} classes, "
               f"normalized GIL {gil['normalized']:.4f}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True),
              help="sweep config JSON")
@click.option("--out", required=True, type=click.Path(), help="output directory")
@_fail_on_error
def sweep(config_path, out):
    """Run the anonymize/classify/evaluate sweep and emit reports."""
    import os

    with open(config_path, encoding="utf-8") as fh:
        obj = json.load(fh)
    base = os.path.dirname(os.path.abspath(config_path))
    d = _load_dataset(
        os.path.join(base, obj["data"]),
        os.path.join(base, obj["schema"]) if obj.get("schema") else None,
        obj.get("adult", False),
        obj.get("complete_only", False),
        obj.get("sample", {}).get("n", 0),
        obj.get("sample", {}).get("seed", 0),
    )
    hset = _load_trees(os.path.join(base, obj["trees"]), d)
    config = config_from_json(obj, base_dir=base)
    result = run_sweep(config, d, hset)
    written = emit_report(result, out)
    for path in written:
        click.echo(path)


@main.command("eval")
@_with_dataset_options
@click.option("--anonymized", is_flag=True,
              help="input is an exported anonymized CSV (intervals, labels)")
@click.option("--target", required=True,
              type=click.Choice(["income", "education", "marital_status"]))
@click.option("--model", required=True,
              type=click.Choice(["logistic_regression", "linear_svc",
                                 "random_forest", "gradient_boosting"]))
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", type=click.Path(), help="write the report JSON here")
@_fail_on_error
def eval_cmd(data, schema, adult, complete_only, sample_n, sample_seed,
             anonymized, target, model, folds, seed, out):
    """Cross-validate one classifier on one target."""
    if anonymized:
        from .evaluation import load_generalized_csv

        if not schema:
            raise AnonforgeError("--schema is required with --anonymized")
        with open(data, encoding="utf-8") as fh:
            subject = load_generalized_csv(fh.read(), load_schema(schema))
    else:
        _require_schema_or_adult(schema, adult)
        subject = _load_dataset(data, schema, adult, complete_only,
                                sample_n, sample_seed)
    report = cross_validate(ClassifierSpec(model, seed=seed), subject, target,
                            folds=folds, seed=seed)
    text = json.dumps(report.to_json(), indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    click.echo(text)


@main.command()
@click.option("--port", type=int, default=8008, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--workdir", default="anonforge-work", show_default=True)
@click.option("--pool-size", type=int, default=2, show_default=True)
@_fail_on_error
def serve(port, host, workdir, pool_size):
    """Run the HTTP/WebSocket service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(workdir, pool_size), host=host, port=port,
                log_level="info")


@main.group()
def hierarchy():
    """Hierarchy utilities."""


@hierarchy.command()
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--schema", required=True, type=click.Path(exists=True))
@click.option("--tree", required=True, type=click.Path(exists=True))
@click.option("--attribute", required=True)
@_fail_on_error
def validate(data, schema, tree, attribute):
    """Report dataset values that are not leaves of the hierarchy."""
    with open(data, "rb") as fh:
        d = load_csv(fh, load_schema(schema))
    h = load_hierarchy(tree, attribute=attribute)
    violations = validate_against(h, d, attribute)
    if violations:
        for v in violations:
            click.echo(v)
        sys.exit(1)
    click.echo(f"ok: every {attribute!r} value is a leaf of the hierarchy")


@main.group()
def session():
    """Session utilities."""


@session.command("replay")
@_with_dataset_options
@click.option("--trees", required=True, type=click.Path(exists=True))
@click.option("--k", required=True, type=int)
@click.option("--weights", default="equal", show_default=True,
              help="'equal' or a weights JSON file (initial weights)")
@click.option("--m", type=int, default=3, show_default=True)
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@_fail_on_error
def session_replay(data, schema, adult, complete_only, sample_n, sample_seed,
                   trees, k, weights, m, log_path, out):
    """Re-run a recorded action log and write the resulting export."""
    from .anonymizer import export

    _require_schema_or_adult(schema, adult)
    d = _load_dataset(data, schema, adult, complete_only, sample_n, sample_seed)
    hset = _load_trees(trees, d)
    if weights == "equal":
        wv = equal_weights(d.qi_names())
    else:
        with open(weights, encoding="utf-8") as fh:
            wv = WeightVector.normalized(json.load(fh))
    with open(log_path, encoding="utf-8") as fh:
        result = replay(d, hset, k, wv, m, fh.read())
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(export(result))
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()

"""Single entry point: gateway + prediction services, agent replay,
training/evaluation, load testing, and alert export/verify."""
from __future__ import annotations

import json
import logging
import sys
import threading
import time
from pathlib import Path

import click
import httpx

from sentry import __version__
from sentry.config import RunConfig, load_config

log = logging.getLogger(__name__)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _emit(payload: dict, as_json: bool, human: str) -> None:
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True, default=str))
    else:
        click.echo(human)


@click.group()
@click.version_option(version=__version__, prog_name="sentry")
def main() -> None:
    """Endpoint monitoring platform."""
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(levelname)s %(message)s")


# ---------------------------------------------------------------- serve

def _load_registry(cfg: RunConfig, synthetic_models: bool, seed: int):
    from sentry.hatespeech.service import ClassifierRegistry

    registry = ClassifierRegistry(
        verifier=None,
        divergence_path=cfg.divergence_path,
    )
    loaded = []
    if cfg.model_dir:
        for path in sorted(Path(cfg.model_dir).glob("*.json")):
            try:
                loaded.append(registry.load_artifact(path))
            except Exception as exc:
                log.warning("skipping model artifact %s: %s", path, exc)
    if synthetic_models and not loaded:
        from sentry.hatespeech.models import fit
        from sentry.hatespeech.synth import synthetic_corpus
        from sentry.hatespeech.vectorize import fit_vocabulary

        for lang in ("en", "pt", "es"):
            corpus = synthetic_corpus(lang, n=240, seed=seed)
            vocab = fit_vocabulary(corpus)
            registry.register(lang, fit(corpus, "mnb", vocab=vocab, language=lang), vocab)
            loaded.append(lang)
    return registry, loaded


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--bind", default=None)
@click.option("--gateway-port", type=int, default=None)
@click.option("--predict-port", type=int, default=None)
@click.option("--storage", "storage_path", default=None)
@click.option("--models", "model_dir", default=None, help="Directory of model artifact files.")
@click.option("--static", "static_dir", default=None, help="Directory of UI assets to serve at /ui.")
@click.option("--synthetic-models", is_flag=True, help="Train seeded synthetic models when none are found.")
@click.option("--seed", type=int, default=None)
def serve(config_path, bind, gateway_port, predict_port, storage_path, model_dir, static_dir, synthetic_models, seed):
    """Run the gateway and the prediction service, each on its own port."""
    import uvicorn

    from sentry.gateway.app import GatewayConfig, create_gateway_app
    from sentry.hatespeech.service import create_prediction_app

    overrides = {
        "bind": bind,
        "gateway_port": gateway_port,
        "predict_port": predict_port,
        "storage_path": storage_path,
        "model_dir": model_dir,
        "static_dir": static_dir,
        "seed": seed,
    }
    cfg = load_config(config_path, overrides={k: v for k, v in overrides.items() if v is not None})
    click.echo("effective configuration:")
    click.echo(cfg.describe())

    registry, languages = _load_registry(cfg, synthetic_models, cfg.seed)
    click.echo(f"prediction models loaded: {languages or 'none'}")

    gateway_app = create_gateway_app(
        GatewayConfig(
            storage_path=cfg.storage_path,
            storage_backend=cfg.storage_backend,
            ttl_seconds=cfg.ttl_seconds,
            queue_capacity=cfg.queue_capacity,
            queue_workers=cfg.queue_workers,
            max_image_bytes=cfg.max_image_bytes,
            admin_email=cfg.admin_email,
            admin_password=cfg.admin_password,
            static_dir=cfg.static_dir,
        )
    )
    predict_app = create_prediction_app(registry)

    servers = []
    threads = []
    for app, port in ((gateway_app, cfg.gateway_port), (predict_app, cfg.predict_port)):
        server = uvicorn.Server(
            uvicorn.Config(app, host=cfg.bind, port=port, log_level="warning")
        )
        servers.append(server)
        t = threading.Thread(target=server.run, daemon=True)
        threads.append(t)
        t.start()
    click.echo(
        f"gateway on http://{cfg.bind}:{cfg.gateway_port}  "
        f"prediction on http://{cfg.bind}:{cfg.predict_port}  (Ctrl-C stops)"
    )
    try:
        while any(t.is_alive() for t in threads):
            time.sleep(0.2)
    except KeyboardInterrupt:
        for server in servers:
            server.should_exit = True
        for t in threads:
            t.join(timeout=5)


# ---------------------------------------------------------------- agent

def ensure_gateway_account(base_url: str, email: str, password: str, role: str = "user") -> None:
    with httpx.Client(timeout=10.0) as client:
        client.post(
            f"{base_url.rstrip('/')}/api/user",
            json={"email": email, "password": password, "role": role},
        )  # 400 when it already exists is fine


@main.group()
def agent() -> None:
    """Monitoring agent commands."""


@agent.command("run")
@click.option("--replay", "replay_path", type=click.Path(exists=True), required=True)
@click.option("--gateway", "gateway_url", required=True)
@click.option("--predict", "predict_url", default=None, help="Prediction service URL for the hate-speech signal.")
@click.option("--policy-interval", type=float, default=60.0)
@click.option("--seed", type=int, default=0)
@click.option("--email", default="agent@example.com")
@click.option("--password", default="agent-password-1")
@click.option("--match-mode", type=click.Choice(["suffix", "exact"]), default="suffix")
@click.option("--policy-cache", "policy_cache", type=click.Path(), default=None,
              help="Local policy cache file (defaults to SENTRY_POLICY_PATH or ~/.sentry/policy.txt).")
@click.option("--json", "as_json", is_flag=True)
def agent_run(replay_path, gateway_url, predict_url, policy_interval, seed, email, password, match_mode, policy_cache, as_json):
    """Replay a telemetry file against a running gateway."""
    from sentry.agent.indicators import HttpClassifier, NullClassifier
    from sentry.agent.loop import AgentRunner, HttpAlertSink
    from sentry.agent.sources import ReplaySource
    from sentry.policy.model import ScoreConfig
    from sentry.policy.sync import HttpPolicyFetcher, default_policy_path

    try:
        ensure_gateway_account(gateway_url, email, password)
    except httpx.HTTPError as exc:
        _fail(f"gateway unreachable: {exc}")

    cfg = ScoreConfig(
        weights=ScoreConfig.default().weights,
        threshold=ScoreConfig.default().threshold,
        update_interval=policy_interval,
    )
    runner = AgentRunner(
        sources=[ReplaySource(replay_path)],
        sink=HttpAlertSink(gateway_url, email, password),
        cfg=cfg,
        policy_fetcher=HttpPolicyFetcher(gateway_url, email, password),
        classifier=HttpClassifier(predict_url) if predict_url else NullClassifier(),
        seed=seed,
        site_match_mode=match_mode,
        policy_cache_path=policy_cache or default_policy_path(),
    )
    try:
        health = runner.run()
    except Exception as exc:
        _fail(str(exc))
    summary = health.as_dict()
    _emit(
        summary,
        as_json,
        "replay finished: "
        + ", ".join(f"{k}={v}" for k, v in summary.items()),
    )
    if runner.spool and len(runner.spool):
        sys.exit(1)


# ---------------------------------------------------------------- train / evaluate / predict

def _load_corpus(data, language, synthetic, seed, label_map_path=None):
    from sentry.hatespeech.synth import load_csv, load_label_map, synthetic_corpus

    if synthetic:
        return synthetic_corpus(language, n=synthetic, seed=seed)
    if not data:
        _fail("provide --data CSV or --synthetic N")
    label_map = load_label_map(label_map_path) if label_map_path else None
    try:
        return load_csv(data, language=language, label_map=label_map)
    except FileNotFoundError:
        _fail(f"data file not found: {data}")
    except ValueError as exc:
        _fail(str(exc))


@main.command()
@click.option("--lang", "language", type=click.Choice(["en", "pt", "es"]), default="en")
@click.option("--family", type=click.Choice(["logreg", "linear_svm", "mnb"]), default="mnb")
@click.option("--data", type=click.Path(), default=None)
@click.option("--label-map", "label_map_path", type=click.Path(exists=True), default=None)
@click.option("--synthetic", type=int, default=0, help="Train on N synthetic documents instead of a CSV.")
@click.option("--seed", type=int, default=7)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--json", "as_json", is_flag=True)
def train(language, family, data, label_map_path, synthetic, seed, out_path, as_json):
    """Fit one model family for one language and write the artifact."""
    from sentry.hatespeech.models import fit
    from sentry.hatespeech.artifacts import save_model
    from sentry.hatespeech.split import SplitSpec, stratified_split
    from sentry.hatespeech.vectorize import fit_vocabulary

    corpus = _load_corpus(data, language, synthetic, seed, label_map_path)
    try:
        train_docs, val_docs, _test_docs = stratified_split(corpus, SplitSpec(seed=seed))
        vocab = fit_vocabulary(train_docs)
        model = fit(train_docs, family, vocab=vocab, val=val_docs, language=language)
    except ValueError as exc:
        _fail(str(exc))
    save_model(model, vocab, out_path)
    info = {
        "family": family,
        "language": language,
        "n_train": len(train_docs),
        "n_iter": model.n_iter,
        "converged": model.converged,
        "artifact": str(out_path),
    }
    _emit(info, as_json, f"trained {family}/{language}: iters={model.n_iter} -> {out_path}")


@main.command()
@click.option("--lang", "language", type=click.Choice(["en", "pt", "es"]), default="en")
@click.option("--family", type=click.Choice(["logreg", "linear_svm", "mnb"]), default="mnb")
@click.option("--data", type=click.Path(), default=None)
@click.option("--label-map", "label_map_path", type=click.Path(exists=True), default=None)
@click.option("--synthetic", type=int, default=0)
@click.option("--folds", type=int, default=5)
@click.option("--seed", type=int, default=7)
@click.option("--json", "as_json", is_flag=True)
def evaluate(language, family, data, label_map_path, synthetic, folds, seed, as_json):
    """k-fold cross-validation with the full metric bundle."""
    from sentry.hatespeech.evaluate import cross_validate

    corpus = _load_corpus(data, language, synthetic, seed, label_map_path)
    try:
        result = cross_validate(corpus, family, k=folds, seed=seed)
    except ValueError as exc:
        _fail(str(exc))
    summary = result.summary()
    human = (
        f"{family}/{language} {folds}-fold: "
        f"acc {summary['mean']['accuracy']:.4f}±{summary['std']['accuracy']:.4f}, "
        f"auc {summary['mean']['auc_roc']:.4f}, pam {summary['mean']['pam_area']:.4f}"
    )
    _emit(summary, as_json, human)


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--phrase", required=True)
@click.option("--json", "as_json", is_flag=True)
def predict(model_path, phrase, as_json):
    """Classify one phrase with a saved model artifact."""
    from sentry.hatespeech.artifacts import ArtifactCorrupt, load_model
    from sentry.hatespeech.models import predict as predict_doc
    from sentry.hatespeech.normalize import normalize_text

    try:
        model, vocab = load_model(model_path)
    except (ArtifactCorrupt, json.JSONDecodeError) as exc:
        _fail(str(exc))
    doc = normalize_text(phrase, model.language)
    label, score = predict_doc(model, doc, vocab)
    _emit(
        {"phrase": phrase, "classification": label, "score": score, "language": model.language},
        as_json,
        f"classification={label} score={score:.4f} ({model.family}/{model.language})",
    )


@main.command("retrain-from-divergence")
@click.option("--divergence", "divergence_path", type=click.Path(exists=True), required=True)
@click.option("--lang", "language", type=click.Choice(["en", "pt", "es"]), default="en")
@click.option("--family", type=click.Choice(["logreg", "linear_svm", "mnb"]), default="mnb")
@click.option("--data", type=click.Path(), default=None)
@click.option("--synthetic", type=int, default=0)
@click.option("--seed", type=int, default=7)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--json", "as_json", is_flag=True)
def retrain_from_divergence(divergence_path, language, family, data, synthetic, seed, out_path, as_json):
    """Retrain with verifier-confirmed phrases folded in as positives."""
    from sentry.hatespeech.artifacts import save_model
    from sentry.hatespeech.fallback import DivergenceStore
    from sentry.hatespeech.models import fit
    from sentry.hatespeech.normalize import normalize_text
    from sentry.hatespeech.vectorize import fit_vocabulary

    corpus = _load_corpus(data, language, synthetic, seed)
    extra = [
        normalize_text(rec["text"], language, label=1)
        for rec in DivergenceStore(divergence_path).records()
    ]
    merged = list(corpus) + extra
    try:
        vocab = fit_vocabulary(merged)
        model = fit(merged, family, vocab=vocab, language=language)
    except ValueError as exc:
        _fail(str(exc))
    save_model(model, vocab, out_path)
    _emit(
        {"n_divergence": len(extra), "n_total": len(merged), "artifact": str(out_path)},
        as_json,
        f"retrained with {len(extra)} divergence records -> {out_path}",
    )


# ---------------------------------------------------------------- bench / pam

@main.command()
@click.option("--target", required=True)
@click.option("--levels", default="50,100,200,500,1000")
@click.option("--mix", default="auth,image,alert")
@click.option("--rounds", type=int, default=5, help="Requests per worker at each level.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the JSON report here.")
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="Write the CSV report here.")
@click.option("--json", "as_json", is_flag=True)
def bench(target, levels, mix, rounds, out_path, csv_path, as_json):
    """Closed-loop load test at ascending concurrency levels."""
    from sentry.analytics.loadtest import TargetDown, loadtest

    try:
        level_list = sorted(int(x) for x in levels.split(",") if x.strip())
        mix_list = [m.strip() for m in mix.split(",") if m.strip()]
        report = loadtest(target, level_list, mix_list, rounds_per_worker=rounds)
    except (ValueError, TargetDown) as exc:
        _fail(str(exc))
    doc = report.as_dict()
    if out_path:
        Path(out_path).write_text(json.dumps(doc, indent=1), encoding="utf-8")
    if csv_path:
        Path(csv_path).write_text(report.as_csv(), encoding="utf-8")
    lines = [
        f"c={lv.concurrency:5d} mean={lv.mean_ms:8.2f}ms std={lv.std_ms:7.2f} "
        f"p90={lv.p90_ms:8.2f} p95={lv.p95_ms:8.2f} errors={lv.n_errors}"
        for lv in report.levels
    ]
    if "latency_fit" in doc:
        fit = doc["latency_fit"]
        lines.append(f"latency ~ {fit['intercept']:.3f} + {fit['slope']:.4f}*c (r2={fit['r2']:.4f})")
    _emit(doc, as_json, "\n".join(lines))
    if report.partial:
        _fail("target went down mid-run; partial results above")


@main.command()
@click.option("--report", "report_path", type=click.Path(exists=True), required=True)
@click.option("--json", "as_json", is_flag=True)
def pam(report_path, as_json):
    """Polygon area from a metric report JSON file."""
    from sentry.analytics.pam import PAM_AXES, max_pam_area, pam_area

    doc = json.loads(Path(report_path).read_text(encoding="utf-8"))
    if isinstance(doc, list):
        axes = [float(x) for x in doc]
    else:
        try:
            axes = [float(doc[a]) for a in PAM_AXES]
        except KeyError as exc:
            _fail(f"report missing axis {exc}")
    try:
        area = pam_area(axes)
    except ValueError as exc:
        _fail(str(exc))
    _emit(
        {"axes": axes, "pam_area": area, "max_area": max_pam_area(len(axes))},
        as_json,
        f"pam_area={area:.6f} (max {max_pam_area(len(axes)):.6f})",
    )


# ---------------------------------------------------------------- export / verify

@main.command("export")
@click.option("--alert-id", type=int, required=True)
@click.option("--store", "store_path", type=click.Path(), default=None, help="Gateway storage directory.")
@click.option("--gateway", "gateway_url", default=None)
@click.option("--email", default="admin@example.com")
@click.option("--password", default="admin-password-1")
@click.option("--hash-version", type=int, default=1)
@click.option("--out", "out_path", type=click.Path(), required=True)
def export_cmd(alert_id, store_path, gateway_url, email, password, hash_version, out_path):
    """Write a tamper-evident .alert.json export for one alert."""
    from sentry.audit.records import export_alert
    from sentry.gateway.storage import FileStore

    if gateway_url:
        with httpx.Client(timeout=10.0) as client:
            resp = client.post(
                f"{gateway_url.rstrip('/')}/api/login",
                json={"email": email, "password": password},
            )
            if resp.status_code != 200:
                _fail(f"login failed: {resp.status_code}")
            token = resp.json()["token"]
            resp = client.get(
                f"{gateway_url.rstrip('/')}/api/alert/{alert_id}/export",
                params={"hash_version": hash_version},
                headers={"Authorization": f"Bearer {token}"},
            )
            if resp.status_code == 404:
                _fail(f"alert {alert_id} not found")
            if resp.status_code != 200:
                _fail(f"export failed: {resp.status_code}")
            from sentry.audit.records import AlertExport

            doc = AlertExport.from_dict(resp.json())
    elif store_path:
        record = FileStore(store_path).get("alerts", alert_id)
        if record is None:
            _fail(f"alert {alert_id} not found in {store_path}")
        doc = export_alert(record, hash_version=hash_version)
    else:
        _fail("provide --gateway URL or --store PATH")
    Path(out_path).write_text(doc.to_json(), encoding="utf-8")
    click.echo(f"exported alert {alert_id} -> {out_path} (hash {doc.hash[:16]}…)")


@main.command("verify")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--json", "as_json", is_flag=True)
def verify_cmd(in_path, as_json):
    """Verify a previously exported alert record."""
    from sentry.audit.records import AlertExport, MalformedExport, verify_export

    try:
        result = verify_export(AlertExport.from_json(Path(in_path).read_text(encoding="utf-8")))
    except MalformedExport as exc:
        _fail(str(exc))
    _emit(
        {"valid": result.valid, "reason": result.reason},
        as_json,
        "valid" if result.valid else f"invalid: {result.reason}",
    )
    if not result.valid:
        sys.exit(1)


if __name__ == "__main__":
    main()

"""Command line interface: build-dataset, chat, and serve."""

from __future__ import annotations

from pathlib import Path

import click

from .build import build_dataset
from .config import AppConfig, ConfigError, load_config_file
from .corpus import Corpus, CorpusError, load_corpus
from .dialogue import DialogueError, TriageEngine
from .normalize import LexiconError, SynonymLexicon
from .ranking import RankerParams
from .report import write_report
from .scraper import PageResolver, ScrapeConfig, ScrapeError


@click.group(context_settings={"auto_envvar_prefix": "MEDTRIAGE"})
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; top-level keys are subcommand names "
                   "holding flag defaults. Flags override the file.")
@click.pass_context
def main(ctx, config_path):
    """Disease-symptom triage: dataset builder, terminal chat, HTTP service."""
    if config_path:
        try:
            ctx.default_map = load_config_file(config_path)
        except ConfigError as exc:
            raise click.ClickException(str(exc))


def _engine_from_flags(dataset, lexicons, match_threshold) -> TriageEngine:
    config = AppConfig(dataset=dataset, lexicons=list(lexicons),
                       match_threshold=match_threshold)
    config.validate("chat")
    corpus = load_corpus(dataset)
    lexicon = SynonymLexicon.load(*lexicons) if lexicons else SynonymLexicon()
    return TriageEngine(corpus, lexicon, match_threshold=match_threshold)


@main.command("build-dataset")
@click.option("--list-source", required=True,
              help="Disease list page: a local HTML file or an http(s) URL.")
@click.option("--backend", type=click.Choice(["fixture-map", "title-search"]),
              default="fixture-map", show_default=True)
@click.option("--resolver-map", default="", help="name<TAB>slug map (fixture backend).")
@click.option("--fixture-pages", default="", help="Directory of <slug>.html fixtures.")
@click.option("--predefined", default="", help="Plain-text predefined disease list.")
@click.option("--cache-dir", default="", help="Page cache directory (live backend).")
@click.option("--politeness-delay", type=float, default=1.0, show_default=True,
              help="Minimum seconds between live fetches.")
@click.option("--list-region", default=".all-disease", show_default=True,
              help="List-region selector: .class or #id.")
@click.option("--concurrency", type=int, default=1, show_default=True)
@click.option("--lexicon", "lexicons", multiple=True, required=True,
              help="Synonym lexicon file; repeat to merge several.")
@click.option("--merge-threshold", type=float, default=0.75, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Dataset output path (JSONL).")
@click.option("--report-dir", type=click.Path(), default=None,
              help="Report directory [default: <out dir>/report].")
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Render the report figures.")
def cmd_build_dataset(list_source, backend, resolver_map, fixture_pages, predefined,
                      cache_dir, politeness_delay, list_region, concurrency,
                      lexicons, merge_threshold, out, report_dir, figures):
    """Scrape, normalize, index, and write the corpus dataset plus a build report."""
    config = AppConfig(
        lexicons=list(lexicons), merge_threshold=merge_threshold, backend=backend,
        list_source=list_source, predefined=predefined, resolver_map=resolver_map,
        fixture_pages=fixture_pages, cache_dir=cache_dir,
        politeness_delay=politeness_delay, list_region=list_region,
    )
    try:
        config.validate("build-dataset")
        resolver = PageResolver(
            backend=backend,
            fixture_map_path=resolver_map or None,
            fixture_dir=fixture_pages or None,
            cache_dir=cache_dir or None,
            politeness_delay=politeness_delay,
        )
        scrape_config = ScrapeConfig(
            list_source=list_source,
            resolver=resolver,
            predefined_path=predefined or None,
            list_region=list_region,
            concurrency=concurrency,
        )
        corpus, build_report = build_dataset(scrape_config, list(lexicons),
                                             merge_threshold, out)
        out_path = Path(out)
        report_path = Path(report_dir) if report_dir else out_path.parent / "report"
        written = write_report(build_report, corpus, report_path, figures=figures)
    except (ConfigError, ScrapeError, LexiconError, CorpusError, ValueError) as exc:
        raise click.ClickException(str(exc))

    click.echo(f"wrote dataset: {out_path}")
    for line in build_report.summary_lines():
        click.echo(line)
    for path in written:
        click.echo(f"wrote report file: {path}")


def _read(prompt: str) -> str | None:
    try:
        return input(prompt).strip()
    except EOFError:
        return None


def run_chat(engine: TriageEngine, params: RankerParams, top_k: int, batch: int) -> None:
    """Terminal triage loop; deterministic for scripted stdin."""
    corpus = engine.corpus
    session = engine.start_session(params)
    click.echo(f"Loaded corpus: {corpus.index.n_docs} diseases, "
               f"{len(corpus.vocabulary)} symptoms.")
    click.echo("Describe your symptoms, separated by commas. "
               "Type 'done' when finished or 'quit' to exit.")

    stop = False
    while not stop:
        line = _read("symptoms> ")
        if line is None or line.lower() == "quit":
            return
        if line.lower() == "done":
            if session.confirmed:
                break
            click.echo("Enter at least one symptom before 'done'.")
            continue
        for part in (p.strip() for p in line.split(",")):
            if not part:
                continue
            match = engine.match_symptom(session, part)
            if match.matched:
                rep = corpus.vocabulary.representative(match.matched)
                click.echo(f"  matched '{part}' -> {rep} (similarity {match.similarity:.3f})")
            else:
                click.echo(f"  not recognized: '{part}'")
                if match.alternatives:
                    hints = ", ".join(
                        f"{corpus.vocabulary.representative(sid)} ({sim:.2f})"
                        for sid, sim in match.alternatives
                    )
                    click.echo(f"    did you mean: {hints}")
        if not session.confirmed:
            continue
        while not stop:
            suggestions = engine.suggest_cooccurring(session, batch)
            if not suggestions:
                click.echo("No more suggestions.")
                stop = True
                break
            for sid, _count in suggestions:
                rep = corpus.vocabulary.representative(sid)
                while True:
                    answer = _read(f"Do you also have '{rep}'? [y/n/done]> ")
                    if answer is None or answer.lower() == "quit":
                        return
                    answer = answer.lower()
                    if answer == "done":
                        stop = True
                        break
                    if answer in ("y", "yes"):
                        engine.record_response(session, sid, "yes")
                        break
                    if answer in ("n", "no"):
                        engine.record_response(session, sid, "no")
                        break
                    click.echo("Please answer y, n, or done.")
                if stop:
                    break

    ranking = engine.predict(session, top_k)
    confirmed_names = ", ".join(corpus.vocabulary.representative(c) for c in session.confirmed)
    click.echo("")
    click.echo(f"Top {len(ranking)} diseases for: {confirmed_names}")
    click.echo(f"{'rank':>4}  {'disease':<28} {'score':>8}")
    for ranked in ranking:
        name = corpus.by_id[ranked.disease_id].name
        marker = "  (no symptom overlap)" if ranked.zero_score else ""
        click.echo(f"{ranked.rank:>4}  {name:<28} {ranked.score:>8.4f}{marker}")
    click.echo("Enter a rank for details, or 'quit' to exit.")

    while True:
        line = _read("detail> ")
        if line is None or line.lower() == "quit":
            return
        try:
            index = int(line)
        except ValueError:
            click.echo(f"Enter a number between 1 and {len(ranking)}, or 'quit'.")
            continue
        try:
            record = engine.disease_detail(session, index)
        except DialogueError as exc:
            click.echo(f"error: {exc}")
            continue
        click.echo(f"--- {record.name} ---")
        click.echo(f"Symptoms: {', '.join(record.raw_symptoms)}")
        if record.description:
            click.echo(record.description)
        click.echo(f"Treatment: {record.treatment or '(none listed)'}")


@main.command("chat")
@click.option("--dataset", required=True, type=click.Path())
@click.option("--lexicon", "lexicons", multiple=True,
              help="Synonym lexicon used for matching (use the build lexicons).")
@click.option("--match-threshold", type=float, default=0.4, show_default=True)
@click.option("--model", type=click.Choice(["tfidf", "bm25"]), default="tfidf",
              show_default=True)
@click.option("--k1", type=float, default=1.5, show_default=True)
@click.option("--b", type=float, default=0.75, show_default=True)
@click.option("--top-k", type=int, default=10, show_default=True)
@click.option("--batch", type=int, default=5, show_default=True,
              help="Suggestions per prompt round.")
def cmd_chat(dataset, lexicons, match_threshold, model, k1, b, top_k, batch):
    """Interactive terminal triage session over a built dataset."""
    try:
        engine = _engine_from_flags(dataset, lexicons, match_threshold)
        params = RankerParams(model=model, k1=k1, b=b)
    except (ConfigError, CorpusError, LexiconError, ValueError) as exc:
        raise click.ClickException(str(exc))
    run_chat(engine, params, top_k, batch)


@main.command("serve")
@click.option("--dataset", required=True, type=click.Path())
@click.option("--lexicon", "lexicons", multiple=True)
@click.option("--match-threshold", type=float, default=0.4, show_default=True)
@click.option("--model", type=click.Choice(["tfidf", "bm25"]), default="tfidf",
              show_default=True)
@click.option("--k1", type=float, default=1.5, show_default=True)
@click.option("--b", type=float, default=0.75, show_default=True)
@click.option("--top-k", type=int, default=10, show_default=True)
@click.option("--batch", type=int, default=5, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed CORS origin; repeat for several.")
@click.option("--session-ttl", type=float, default=1800.0, show_default=True,
              help="Idle session eviction, seconds.")
def cmd_serve(dataset, lexicons, match_threshold, model, k1, b, top_k, batch,
              host, port, cors_origins, session_ttl):
    """Serve the triage API (consumed by the chat UI) over HTTP."""
    try:
        engine = _engine_from_flags(dataset, lexicons, match_threshold)
        params = RankerParams(model=model, k1=k1, b=b)
    except (ConfigError, CorpusError, LexiconError, ValueError) as exc:
        raise click.ClickException(str(exc))
    from .service import create_app

    app = create_app(engine, params=params, top_k=top_k, suggestion_batch=batch,
                     cors_origins=list(cors_origins), session_ttl=session_ttl)
    import uvicorn

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

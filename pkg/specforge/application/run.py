import os
import sys

import specforge.global_config as gc
from specforge.gateway.mock import load_script
from specforge.pipeline.config import RunConfig, load_run_config
from specforge.pipeline.runner import Pipeline
from specforge.pipeline.store import CONFIG_FILE, RunStore
from specforge.reporting.export import export_corpus
from specforge.reporting.report import render_report
from specforge.similarity.embedding import HashEmbeddingProvider
from specforge.stats.descriptive import format_value
from specforge.utilities.errors import DataIntegrityError, PreconditionError, SpecforgeError
from specforge.utilities.io import arg_parser
from specforge.utilities.io.files import make_directory, read_json
from specforge.utilities.io.logger import MyLogger
from specforge.utilities.timestamps import fixed_clock

run_loc = 'specforge'


def run_config(args):
    """Stored configuration of an existing run, else the config file with the command line overrides."""
    config = load_run_config(args.config)
    run_id = args.run or config.run_id
    stored = os.path.join(args.runs_dir, run_id, CONFIG_FILE)
    if os.path.isfile(stored):
        return RunConfig.from_dict(read_json(stored))
    return config.with_overrides(run_id=run_id, domains=args.domains, docs_per_domain=args.docs_per_domain,
                                 nproc=args.nproc)


def build_pipeline(args):
    config = run_config(args)
    store = RunStore(args.runs_dir, config.run_id)
    make_directory(store.run_dir)
    MyLogger.initialize_logFile(store.run_dir, 'specforge')
    if not args.mock:
        return Pipeline(config, store)
    if not os.path.exists(args.mock):
        raise PreconditionError('No mock script at {}'.format(args.mock))
    MyLogger.print_and_log('Using scripted providers from {}'.format(args.mock), run_loc)
    return Pipeline(config, store, load_script(args.mock), HashEmbeddingProvider(), clock=fixed_clock(),
                    sleep=lambda seconds: None)


def _ratings(pairs):
    ratings = {}
    for doc_id, value in pairs:
        try:
            ratings[doc_id] = int(value)
        except ValueError:
            raise PreconditionError('Rating of {} is not an integer: {!r}'.format(doc_id, value))
    return ratings


def _validation_settings(pipeline, requested):
    if requested:
        return requested
    config = pipeline.config
    return [config.generation_setting] + [s.setting_id for s in config.settings
                                          if s.context_mode == gc.new_context and s.setting_id != config.generation_setting]


def execute(args):
    """Runs one command against its pipeline."""
    pipeline = build_pipeline(args)

    def writefunc(string): return MyLogger.print_and_log(string, run_loc)

    if args.command == 'propose-domains':
        proposal = pipeline.propose_domains(args.count, args.setting, args.exclude)
        for name in proposal.names:
            writefunc(name)
    elif args.command == 'approve-domains':
        for domain in pipeline.approve_domains(args.entries):
            writefunc('Approved {} ({})'.format(domain.name, domain.abbreviation))
    elif args.command == 'generate':
        record = pipeline.run_iteration(args.iteration, args.domains, resume=args.resume)
        writefunc('Iteration {}: {} documents in {} domains'.format(record.iteration, len(record.documents()),
                                                                   len(record.domains)))
    elif args.command == 'assess':
        results = pipeline.reassess(args.iteration, args.setting)
        writefunc('Assessed {} documents'.format(len(results)))
    elif args.command == 'similarity':
        for domain, record in pipeline.similarity(args.iteration).items():
            writefunc('{}: {}'.format(domain, ', '.join(format_value(s, 2) for s in record.scores())))
    elif args.command == 'stats':
        data = pipeline.run_stats(args.policy)
        for row in data['trend']:
            writefunc('Iteration {}: words {}, DoR {}, similarity {}'.format(
                row['iteration'], format_value(row['words'], 0), format_value(row['dor'], 2),
                format_value(row['similarity'], 2)))
    elif args.command == 'validate':
        result = pipeline.cross_model_assess(_validation_settings(pipeline, args.setting), args.iteration)
        writefunc('\n' + result.matrix.to_text())
        for setting_id, failed in result.failures.items():
            if failed:
                writefunc('{}: {} assessments failed'.format(setting_id, failed))
    elif args.command == 'reliability':
        result = pipeline.reliability_study(args.document, args.runs, args.setting)
        policy = args.policy or pipeline.config.outlier_policy
        display = result.stats.display(2)
        writefunc(', '.join('{} {}'.format(k, v) for k, v in display.items()))
        writefunc('Outliers ({}): {}'.format(policy, ', '.join(format_value(v, 2) for v in result.outliers[policy])
                                             or 'none'))
    elif args.command == 'decide':
        record = pipeline.record_decision(args.iteration, args.decision, args.rationale, _ratings(args.ratings))
        writefunc('Iteration {} sealed as {}'.format(record.iteration, record.decision))
    elif args.command == 'report':
        for path in render_report(pipeline.store, args.format, args.iteration):
            writefunc(pipeline.store.path(path))
    elif args.command == 'export':
        writefunc(export_corpus(pipeline.store, args.out))


def main(argv=None):
    """Command line entry point.

    Returns:
        int: 0 on success, else the exit code of the error family.
    """
    quiet = MyLogger.quiet
    try:
        args = arg_parser.get_args(argv)
        MyLogger.quiet = quiet or args.quiet
        execute(args)
    except SpecforgeError as e:
        MyLogger.print_and_log('{}: {}'.format(type(e).__name__, e), run_loc, level=2)
        return e.exit_code
    except OSError as e:
        MyLogger.print_and_log('Run directory not usable: {}'.format(e), run_loc, level=2)
        return DataIntegrityError.exit_code
    finally:
        MyLogger.quiet = quiet
    return 0


if __name__ == '__main__':
    sys.exit(main())

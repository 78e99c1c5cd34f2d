import argparse

import specforge.global_config as gc
from specforge.utilities.errors import UsageError


class SpecforgeArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting, so the caller maps it to exit code 1."""

    def error(self, message):
        raise UsageError('{}: {}'.format(self.prog, message))


def comma_list(value):
    return [item.strip() for item in value.split(',') if item.strip()]


def key_value(value):
    if '=' not in value:
        raise argparse.ArgumentTypeError('expected NAME=VALUE, got {!r}'.format(value))
    key, _, item = value.rpartition('=')
    return key.strip(), item.strip()


def setup_parser():

    parser = SpecforgeArgumentParser(prog='specforge',
                                     description='Generate, assess and analyse synthetic requirements specifications.')

    # Initialize default values for the different arguments
    config = gc.RUN_CONFIG_FILE
    runs_dir = gc.runs_path
    proposal_count = 10
    reliability_runs = 10

    # Set the arguments every command shares
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=config,
                        help='Run configuration file, used when a run is created. Default is {}.'.format(config))
    common.add_argument('--runs-dir', type=str, default=runs_dir,
                        help='Directory holding all runs. Default is {}.'.format(runs_dir))
    common.add_argument('--run', type=str,
                        help='Run id, the run_id of the configuration file by default.')
    common.add_argument('--domains', type=comma_list,
                        help='Comma separated domain abbreviations.')
    common.add_argument('--docs-per-domain', type=int,
                        help='Documents generated per domain.')
    common.add_argument('--nproc', type=int,
                        help='Domains processed in parallel.')
    common.add_argument('--mock', type=str,
                        help='Script file or directory; replaces every model with deterministic scripted providers.')
    common.add_argument('--quiet', action='store_true',
                        help='Only write the log file.')

    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    cmd = commands.add_parser('propose-domains', parents=[common], help='Ask a model for candidate domains.')
    cmd.add_argument('--count', type=int, default=proposal_count,
                     help='Domains requested. Default value is {}.'.format(proposal_count))
    cmd.add_argument('--setting', type=str, help='Model setting, the generation setting by default.')
    cmd.add_argument('--exclude', type=comma_list, default=[], help='Comma separated names to leave out.')

    cmd = commands.add_parser('approve-domains', parents=[common], help='Add reviewed domains to the run.')
    cmd.add_argument('entries', type=key_value, nargs='+', metavar='NAME=ABBREVIATION',
                     help='Approved domain and its lowercase abbreviation.')

    cmd = commands.add_parser('generate', parents=[common], help='Run one iteration.')
    cmd.add_argument('--iteration', type=int, help='Iteration number, the next one by default.')
    cmd.add_argument('--resume', action='store_true', help='Continue a partial iteration.')

    cmd = commands.add_parser('assess', parents=[common], help='Assess a stored corpus again in fresh contexts.')
    cmd.add_argument('--iteration', type=int, help='Iteration, the latest complete one by default.')
    cmd.add_argument('--setting', type=str, help='Model setting, the generation setting by default.')

    cmd = commands.add_parser('similarity', parents=[common], help='Pairwise similarity of an iteration.')
    cmd.add_argument('--iteration', type=int, help='Iteration, the latest one by default.')

    cmd = commands.add_parser('stats', parents=[common], help='Descriptive statistics of every complete iteration.')
    cmd.add_argument('--policy', type=str, choices=gc.outlier_policies,
                     help='Outlier policy, the configured one by default.')

    cmd = commands.add_parser('validate', parents=[common], help='Assess an iteration with several model settings.')
    cmd.add_argument('--iteration', type=int, help='Iteration, the latest complete one by default.')
    cmd.add_argument('--setting', type=comma_list,
                     help='Comma separated settings, the generation setting and every new-context setting by default.')

    cmd = commands.add_parser('reliability', parents=[common], help='Repeat the DoR assessment of one document.')
    cmd.add_argument('--document', type=str, required=True, help='Document id, e.g. iteration-1/fin/ssyrs-1.')
    cmd.add_argument('--runs', type=int, default=reliability_runs,
                     help='Number of runs. Default value is {}.'.format(reliability_runs))
    cmd.add_argument('--setting', type=str, help='Model setting, the generation setting by default.')
    cmd.add_argument('--policy', type=str, choices=gc.outlier_policies,
                     help='Outlier policy shown, the configured one by default.')

    cmd = commands.add_parser('decide', parents=[common], help='Record the decision on an iteration.')
    cmd.add_argument('--iteration', type=int, required=True, help='Iteration to seal.')
    cmd.add_argument('--decision', type=str, required=True, choices=(gc.decision_continue, gc.decision_terminate))
    cmd.add_argument('--rationale', type=str, required=True, help='Why the iteration continues or ends.')
    cmd.add_argument('--ratings', type=key_value, nargs='*', default=[], metavar='DOCUMENT=RATING',
                     help='Reviewer ratings from 1 to 5.')

    cmd = commands.add_parser('report', parents=[common], help='Write the report tables.')
    cmd.add_argument('--iteration', type=int, nargs='*', help='Iterations, every complete one by default.')
    cmd.add_argument('--format', type=str, choices=gc.report_formats, help='Only this format.')

    cmd = commands.add_parser('export', parents=[common], help='Copy the complete iterations to a directory.')
    cmd.add_argument('--out', type=str, required=True, help='Destination directory, must not exist.')

    return parser


def get_args(argv=None):
    return setup_parser().parse_args(argv)

# -*- coding: utf-8 -*-
"""
Command line entry point: python -m rpdsmc.main <command> ...

Exit codes: 0 for a holding formula or a clean run, 1 for a violated
formula or a failed probe, 2 for input errors and exceeded resource guards.
"""

# System import
import sys
import argparse
import logging

# Package import
from rpdsmc.commands import COMMANDS
from rpdsmc.pdsmc import RESOURCE
from rpdsmc.utils import (setup_logging, FormatError, LtlSyntaxError, ImproperIdError,
                          ResourceLimitError)


logger = logging.getLogger("rpdsmc")


def get_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", dest="log_level", default="info",
                        choices=["debug", "info", "warning", "error", "critical"])
    common.add_argument("--logfile", type=str, help="Also write the logs to this file.")
    common.add_argument("--progress", action="store_true", help="Display progress bars.")
    common.add_argument("--json", action="store_true", help="Print a JSON report.")
    common.add_argument("--n-jobs", dest="n_jobs", type=int, default=1,
                        help="Number of workers deriving the reduced rules.")

    # Resource guards
    common.add_argument("--max-k", dest="max_k", type=int)
    common.add_argument("--max-annotator-states", dest="max_annotator_states", type=int)
    common.add_argument("--max-product-rules", dest="max_product_rules", type=int)
    common.add_argument("--max-nodes", dest="max_nodes", type=int,
                        help="Maximum number of IDs explored by the oracle.")
    common.add_argument("--max-stack", dest="max_stack", type=int,
                        help="Maximum stack height explored by the oracle.")
    common.add_argument("--witness-nodes", dest="witness_nodes", type=int,
                        help="Maximum number of configurations visited by the witness search.")

    parser = argparse.ArgumentParser(
        prog="rpdsmc", description="LTL model checking of register pushdown systems.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def formula_arguments(sub):
        sub.add_argument("--val", action="append", metavar="ATOM=PATH",
                         help="Register automaton of an atom; repeat for each atom.")
        group = sub.add_mutually_exclusive_group(required=True)
        group.add_argument("--ltl", type=str, help="The formula.")
        group.add_argument("--ltl-file", dest="ltl_file", type=str,
                           help="A file holding the formula.")
        sub.add_argument("--save", type=str, help="Pickle the verdict to this file.")

    check = subparsers.add_parser("check", parents=[common],
                                  help="Model check through the pushdown reduction.")
    check.add_argument("system", type=str)
    check.add_argument("start", type=str)
    formula_arguments(check)
    check.add_argument("--no-witness", dest="no_witness", action="store_true")
    check.add_argument("--concretize", action="store_true",
                       help="Render the witness as register pushdown IDs.")

    reduce = subparsers.add_parser("reduce", parents=[common], help="Print the reduced PDS.")
    reduce.add_argument("system", type=str)
    reduce.add_argument("--start", type=str, help="Keep the rules reachable from this ID.")
    reduce.add_argument("--save", type=str, help="Pickle the reduced system to this file.")

    simulate = subparsers.add_parser("simulate", parents=[common], help="Run a system.")
    simulate.add_argument("system", type=str)
    simulate.add_argument("start", type=str)
    simulate.add_argument("--rules", type=str, help="Comma separated rule names to apply.")
    simulate.add_argument("--choose", type=str, help="Comma separated successor indices.")
    simulate.add_argument("--steps", type=int, default=10,
                          help="Number of steps taking the first successor.")

    bisim = subparsers.add_parser("bisim", parents=[common],
                                  help="Probe the correspondence with the reduced PDS.")
    bisim.add_argument("system", type=str)
    bisim.add_argument("start", type=str)
    bisim.add_argument("--depth", type=int, default=6)

    oracle = subparsers.add_parser("oracle", parents=[common],
                                   help="Model check by explicit exploration.")
    oracle.add_argument("system", type=str)
    oracle.add_argument("start", type=str)
    formula_arguments(oracle)
    oracle.add_argument("--dump", action="store_true", help="Print the explored graph.")

    enum_phi = subparsers.add_parser("enum-phi", parents=[common],
                                     help="Count the relations over k registers.")
    enum_phi.add_argument("-k", type=int, required=True)
    enum_phi.add_argument("--blocks", action="store_true", help="List the relations.")
    return parser


def main(argv=None):
    args = get_parser().parse_args(argv)
    setup_logging(args.log_level, args.logfile)
    command = COMMANDS[args.command](args)
    try:
        return command.run()
    except ResourceLimitError as error:
        print("{0} ({1}): {2}".format(RESOURCE.upper(), error.kind, error))
        return 2
    except (FormatError, LtlSyntaxError, ImproperIdError, ValueError, OSError) as error:
        logger.error(str(error))
        return 2


if __name__ == "__main__":
    sys.exit(main())

# -*- coding: utf-8 -*-
"""
The command line sub-commands: each one builds its inputs from the parsed
arguments, runs, prints its report on the standard output and returns the
exit code.
"""

# System import
import json
import logging
from collections import OrderedDict

# Package import
from .eqrel import enumerate_phi, bell_number
from .formats import (load_rpds, load_ra, load_id, render_id, render_pds_id,
                      render_lasso, render_reduced, render_graph)
from .history import History
from .ltl import parse_ltl, atoms as formula_atoms
from .machines import is_proper, rpds_run
from .oracle import explore, check_finite
from .pdsmc import model_check_pds, Lasso, HOLDS, VIOLATED
from .reduction import reduce_rpds, reduce_ra, map_id, bisim_probe, lift_path
from .utils import Limits, ImproperIdError, save_pickle_obj


# Global parameters
logger = logging.getLogger("rpdsmc")
EXIT_CODES = {HOLDS: 0, VIOLATED: 1}


class BaseCommand(object):
    name = None

    def __init__(self, args):
        self.args = args
        self.limits = BaseCommand.build_limits(args)
        self.history = History(self.name, verbose=int(args.log_level == "debug"))

    def run(self):
        raise NotImplementedError()

    def report(self, text, payload):
        if getattr(self.args, "json", False):
            print(json.dumps(payload, indent=2, default=str))
        else:
            print(text)

    @staticmethod
    def build_limits(args):
        defaults = Limits()
        return Limits(**{field: getattr(args, field, None) or getattr(defaults, field)
                         for field in Limits._fields})

    @staticmethod
    def build_system(path):
        return load_rpds(path)

    @staticmethod
    def build_start(path, m):
        c0 = load_id(path, m.k)
        if c0.state not in m.states:
            raise ValueError("Unknown state {0} in the start ID.".format(c0.state))
        if not is_proper(c0):
            raise ImproperIdError("The start ID {0} is not proper.".format(render_id(c0)))
        if len(c0.stack) == 0:
            raise ValueError("The start ID needs a non empty stack.")
        return c0

    @staticmethod
    def build_formula(args):
        if args.ltl_file is not None:
            with open(args.ltl_file, "rt", encoding="utf-8") as of:
                return parse_ltl(of.read())
        if args.ltl is None:
            raise ValueError("A formula is needed: use --ltl or --ltl-file.")
        return parse_ltl(args.ltl)

    @staticmethod
    def build_valuation(bindings, m, f):
        """ Load the automaton of every atom, lifted to the system states.
        """
        valuation = OrderedDict()
        for binding in bindings or []:
            if "=" not in binding:
                raise ValueError("Expected <atom>=<path>, got '{0}'.".format(binding))
            atom, path = binding.split("=", 1)
            ra = load_ra(path)
            if ra.k != m.k:
                raise ValueError("Atom {0} uses {1} registers, the system {2}.".format(
                    atom, ra.k, m.k))
            if set(ra.initial) != set(m.states):
                ra = ra.as_valuation(m.states)
            valuation[atom] = ra
        missing = formula_atoms(f) - set(valuation)
        if missing:
            raise ValueError("No automaton for atoms {0}.".format(sorted(missing)))
        return valuation

    def save(self, obj):
        if getattr(self.args, "save", None):
            save_pickle_obj(obj, self.args.save)
            logger.info("Saved %s.", self.args.save)


def _lasso_payload(lasso, render):
    if lasso is None:
        return None
    return {"stem": [render(c) for c in lasso.stem],
            "loop": [render(c) for c in lasso.loop],
            "stem_labels": [sorted(x) for x in lasso.stem_labels],
            "loop_labels": [sorted(x) for x in lasso.loop_labels]}


class CheckCommand(BaseCommand):
    """ Model check an RPDS through its PDS reduction.
    """
    name = "check"

    def run(self):
        m = self.build_system(self.args.system)
        c0 = self.build_start(self.args.start, m)
        f = self.build_formula(self.args)
        ras = self.build_valuation(self.args.val, m, f)
        reduced = reduce_rpds(m, start=c0, max_k=self.limits.max_k, n_jobs=self.args.n_jobs)
        self.history.log("reduce", pds_states=len(reduced.pds.states),
                         pds_rules=len(reduced.pds.rules))
        valuation = OrderedDict(
            (atom, reduce_ra(ra, m.states, max_k=self.limits.max_k, n_jobs=self.args.n_jobs))
            for atom, ra in ras.items())
        self.history.log("valuation", nfa_rules=sum(len(a.base.rules) for a in valuation.values()))
        verdict = model_check_pds(reduced.pds, valuation, f, map_id(c0), limits=self.limits,
                                  witness=not self.args.no_witness, history=self.history,
                                  progress=self.args.progress)
        lasso, render = verdict.witness, render_pds_id
        if lasso is not None and self.args.concretize:
            path = lift_path(m, c0, list(lasso.stem) + list(lasso.loop))
            if path is None:
                logger.warning("The witness could not be concretized.")
            else:
                lasso = Lasso(path[:len(lasso.stem)], path[len(lasso.stem):],
                              lasso.stem_labels, lasso.loop_labels)
                render = render_id
        self.history.summary()
        self.save({"verdict": verdict, "history": self.history})
        text = verdict.status.upper()
        if lasso is not None:
            text += "\nwitness:\n" + render_lasso(lasso, render)
        self.report(text, {"command": self.name, "formula": str(f), "verdict": verdict.status,
                           "statistics": self.history.to_dict(),
                           "witness": _lasso_payload(lasso, render)})
        return EXIT_CODES[verdict.status]


class ReduceCommand(BaseCommand):
    """ Print the PDS of an RPDS with the provenance of its rules.
    """
    name = "reduce"

    def run(self):
        m = self.build_system(self.args.system)
        c0 = self.build_start(self.args.start, m) if self.args.start else None
        reduced = reduce_rpds(m, start=c0, max_k=self.limits.max_k, n_jobs=self.args.n_jobs)
        self.save(reduced)
        self.report(render_reduced(reduced).rstrip("\n"), {
            "command": self.name, "states": len(reduced.pds.states),
            "symbols": len(reduced.pds.alphabet), "rules": len(reduced.pds.rules)})
        return 0


class SimulateCommand(BaseCommand):
    """ Run an RPDS from an ID, choosing the rules by name or by index.
    """
    name = "simulate"

    def run(self):
        m = self.build_system(self.args.system)
        c0 = self.build_start(self.args.start, m)
        if self.args.rules:
            choices = [name.strip() for name in self.args.rules.split(",") if name.strip()]
        elif self.args.choose:
            choices = [int(index) for index in self.args.choose.split(",") if index.strip()]
        else:
            choices = [0] * self.args.steps
        run = rpds_run(m, c0, choices)
        lines = [render_id(c0)]
        lines += ["{0}: {1}".format(m.rule_name(rule), render_id(c)) for rule, c in run]
        if len(run) < len(choices):
            lines.append("deadlock")
        self.report("\n".join(lines), {
            "command": self.name, "start": render_id(c0),
            "steps": [{"rule": m.rule_name(rule), "id": render_id(c)} for rule, c in run],
            "deadlock": len(run) < len(choices)})
        return 0


class BisimCommand(BaseCommand):
    """ Probe the correspondence between an RPDS and its PDS from an ID.
    """
    name = "bisim"

    def run(self):
        m = self.build_system(self.args.system)
        c0 = self.build_start(self.args.start, m)
        reduced = reduce_rpds(m, max_k=self.limits.max_k, n_jobs=self.args.n_jobs)
        report = bisim_probe(m, reduced, c0, self.args.depth)
        if report.clean:
            text = "CLEAN ({0} IDs checked)".format(report.checked)
        else:
            text = "VIOLATION of clause {0}\n  at {1}\n  image {2}\n  unmatched {3}".format(
                report.clause, render_id(report.rpds_id), render_pds_id(report.pds_id),
                render_pds_id(report.witness))
        self.report(text, {"command": self.name, "clean": report.clean,
                           "clause": report.clause, "checked": report.checked})
        return 0 if report.clean else 1


class OracleCommand(BaseCommand):
    """ Model check an RPDS by explicit exploration of its bounded IDs.
    """
    name = "oracle"

    def run(self):
        m = self.build_system(self.args.system)
        c0 = self.build_start(self.args.start, m)
        f = self.build_formula(self.args)
        valuation = self.build_valuation(self.args.val, m, f)
        graph = explore(m, valuation, c0, max_nodes=self.limits.max_nodes,
                        max_stack=self.limits.max_stack, progress=self.args.progress)
        self.history.log("explore", nodes=len(graph), deadlocks=len(graph.deadlocks))
        verdict = check_finite(graph, f, c0)
        self.history.log("check", **verdict.statistics)
        self.history.summary()
        self.save({"verdict": verdict, "history": self.history})
        text = verdict.status.upper()
        if verdict.witness is not None:
            text += "\nwitness:\n" + render_lasso(verdict.witness, render_id)
        if self.args.dump:
            text = render_graph(graph) + text
        self.report(text, {"command": self.name, "formula": str(f), "verdict": verdict.status,
                           "statistics": self.history.to_dict(),
                           "witness": _lasso_payload(verdict.witness, render_id)})
        return EXIT_CODES[verdict.status]


class EnumPhiCommand(BaseCommand):
    """ Count, or list, the relations over k registers.
    """
    name = "enum-phi"

    def run(self):
        phis = enumerate_phi(self.args.k, max_k=self.limits.max_k)
        lines = ["{0}".format(len(phis))]
        if self.args.blocks:
            lines += [str(phi) for phi in phis]
        self.report("\n".join(lines), {"command": self.name, "k": self.args.k, "count": len(phis),
                                       "bell": bell_number(2 * self.args.k + 1)})
        return 0


COMMANDS = OrderedDict((cls.name, cls) for cls in (
    CheckCommand, ReduceCommand, SimulateCommand, BisimCommand, OracleCommand, EnumPhiCommand))

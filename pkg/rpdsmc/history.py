# -*- coding: utf-8 -*-
"""
Module that tracks the statistics of a model checking run.
"""


# System import
import logging
import collections
import time
import datetime

# Third party import
from tabulate import tabulate


# Global parameters
logger = logging.getLogger("rpdsmc")


class History(object):
    """ Track a run by recording some statistics at each phase.
    """
    def __init__(self, name, verbose=0):
        """ Initialize the class.

        Parameters
        ----------
        name: str
            the object name.
        verbose: int, default 0
            control the verbosity level.
        """
        self.name = name
        self.verbose = verbose
        self.step = None
        self.metrics = []
        self.history = collections.OrderedDict()

    def __repr__(self):
        """ Display the history, one row per phase.
        """
        table = []
        for step in self.steps:
            values = []
            for metric in self.metrics:
                values.append(self.history[step].get(metric, ""))
            table.append([step] + values)
        return tabulate(table, headers=["phase"] + self.metrics)

    def log(self, step, **kwargs):
        """ Record some statistics at a specific phase.

        Example:
            state = History("check")
            state.log("reduce", pds_states=156, pds_rules=1300)

        If logging the same statistics for one phase, new values
        overwrite older ones.

        Parameters
        ----------
        step: str, int or uplet
            the phase name.
        kwargs
            the statistics to be logged.
        """
        if not isinstance(step, (str, int, tuple)):
            raise ValueError("Step must be a str, an int or a tuple.")
        self.step = step
        for key in kwargs:
            if key not in self.metrics:
                self.metrics.append(key)
        if step not in self.history:
            self.history[step] = {}
        for key, val in kwargs.items():
            self.history[step][key] = val
        self.history[step]["__timestamp__"] = time.time()
        if self.verbose > 0:
            logger.debug("%s %s: %s", self.name, step, kwargs)

    @property
    def steps(self):
        """ Returns a list of all steps.
        """
        return list(self.history.keys())

    def __getitem__(self, metric):
        steps = []
        data = []
        for step in self.steps:
            if metric in self.history[step]:
                steps.append(step)
                data.append(self.history[step][metric])
        return steps, data

    def last(self, metric, default=None):
        steps, data = self[metric]
        return data[-1] if data else default

    def summary(self):
        if len(self.steps) == 0:
            return
        msg = "{:6s} ".format(self.name)
        for step in self.steps:
            values = ", ".join("{0}={1}".format(key, val)
                               for key, val in self.history[step].items()
                               if key != "__timestamp__")
            msg += "[{0}: {1}] ".format(step, values)
        msg += "{}".format(str(self.get_total_time()))
        logger.info(msg)
        logger.debug("%s statistics:\n%r", self.name, self)

    def get_total_time(self):
        """ Returns the total period between the first and last steps.
        """
        if len(self.steps) == 0:
            return datetime.timedelta(0)
        seconds = (
            self.history[self.steps[-1]]["__timestamp__"]
            - self.history[self.steps[0]]["__timestamp__"])
        return datetime.timedelta(seconds=seconds)

    def to_dict(self):
        """ Returns the last value of every statistic.
        """
        this_dict = collections.OrderedDict()
        for step, metrics in self.history.items():
            for metric, val in metrics.items():
                if metric != "__timestamp__":
                    this_dict[metric] = val
        return this_dict


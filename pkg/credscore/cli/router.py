import argparse

from .commands import assess, classify, correlate, explain, ingest, rank, report, train, verify

COMMANDS = (ingest, train, classify, verify, rank, correlate, explain, report, assess)


def include_commands(subparsers: argparse._SubParsersAction) -> None:
    for command in COMMANDS:
        command.register(subparsers)

"""
Main command group that includes all command modules
"""

import click

from carbon_hedge.cli.commands import embed, pipeline, report, synth

COMMANDS: list[click.Command] = [
    pipeline.run_command,
    pipeline.windows_command,
    synth.synth_command,
    embed.embed_command,
    report.report_command,
]


def include_commands(group: click.Group) -> click.Group:
    for command in COMMANDS:
        group.add_command(command)
    return group

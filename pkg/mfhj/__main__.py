from mfhj.main import cli

cli()

import typer

from cli.commands import evaluate, generate, learn, sample
from cli.dependencies import get_config, setup_logging
from core.errors import ConfigError


app = typer.Typer(
    name="pdfa-distill",
    help="Learn probabilistic automata from string-probability queries.",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def main() -> None:
    try:
        config = get_config()
    except ConfigError as e:
        raise typer.BadParameter(str(e)) from e
    setup_logging(config)


app.command("learn")(learn.learn)
app.command("eval")(evaluate.evaluate_hypothesis)
app.command("generate")(generate.generate)
app.command("sample")(sample.sample)


if __name__ == "__main__":
    app()

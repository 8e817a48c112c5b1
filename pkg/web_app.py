"""
Web Application for the Milnor fiber engine - Flask-based JSON interface.
Every endpoint takes the same fields as the matching CLI subcommand and
returns the CLI's JSON payload.
"""

import logging
from typing import Dict, List

from flask import Flask, jsonify, request

from app import MilnorApplication, build_parser
from config import WEB_HOST, WEB_PORT
from gamma_calc import MotivicError
from utils import ParseError, to_json

logger = logging.getLogger(__name__)

app = Flask(__name__)
engine = MilnorApplication()

# endpoint -> (positional fields, option fields, flag fields)
COMMANDS = {
    "newton": (["poly"], [], []),
    "milnor": (["poly"], ["field", "sign", "retraction", "realize"], ["check"]),
    "zeta": (["poly"], ["field", "sign", "coeffs"], ["limit", "topological", "check"]),
    "ts": ([], ["f", "g", "N", "m"], ["check"]),
    "tconvex": (["poly"], ["sign"], ["check"]),
    "oracle": (["kind", "poly"], ["sign"], []),
}


class RequestError(ValueError):
    """Custom exception for request bodies the CLI parser rejects."""
    pass


def to_argv(command: str, data: Dict) -> List[str]:
    """
    Translate a JSON body into CLI arguments for one subcommand.

    Args:
        command: Subcommand name
        data: Request body

    Returns:
        argv list, e.g. ["milnor", "--field=R", "--", "x^2+y^3"]
    """
    positional, options, flags = COMMANDS[command]
    argv = [command]
    for name in options:
        if name in data:
            value = data[name]
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            argv.append(f"--{name}={value}")
    argv += [f"--{name}" for name in flags if data.get(name)]
    values = []
    for name in positional:
        value = str(data.get(name, "")).strip()
        if not value:
            raise RequestError(f"'{name}' cannot be empty")
        values.append(value)
    # Positionals follow "--" so a leading minus sign is not read as an option.
    if values:
        argv += ["--"] + values
    return argv


def run_command(command: str, data: Dict):
    parser = build_parser()
    try:
        args = parser.parse_args(to_argv(command, data))
    except SystemExit as e:
        raise RequestError(f"invalid arguments for {command}") from e
    payload, _, ok = engine.execute(args)
    payload["ok"] = ok
    return payload


def _handle(command: str):
    try:
        data = request.get_json(silent=True) or {}
        return app.response_class(to_json(run_command(command, data)), mimetype="application/json")
    except (RequestError, ParseError) as e:
        return jsonify({'error': str(e)}), 400
    except MotivicError as e:
        return jsonify({'error': str(e), 'kind': type(e).__name__}), 422
    except Exception as e:
        logger.exception("%s failed", command)
        return jsonify({'error': str(e)}), 500


@app.route('/health', methods=['GET'])
def health():
    """Liveness probe."""
    return jsonify({'status': 'ok'})


@app.route('/newton', methods=['POST'])
def newton_endpoint():
    """Newton polygon, faces and nondegeneracy."""
    return _handle("newton")


@app.route('/milnor', methods=['POST'])
def milnor_endpoint():
    """Motivic Milnor fiber with optional realization and checks."""
    return _handle("milnor")


@app.route('/zeta', methods=['POST'])
def zeta_endpoint():
    return _handle("zeta")


@app.route('/ts', methods=['POST'])
def ts_endpoint():
    """Thom-Sebastiani assembly against the direct computation."""
    return _handle("ts")


@app.route('/tconvex', methods=['POST'])
def tconvex_endpoint():
    return _handle("tconvex")


@app.route('/oracle', methods=['POST'])
def oracle_endpoint():
    return _handle("oracle")


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO)
    logger.info("serving on http://%s:%d", WEB_HOST, WEB_PORT)
    app.run(host=WEB_HOST, port=WEB_PORT)

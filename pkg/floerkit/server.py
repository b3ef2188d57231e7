#!/usr/bin/env python3
"""
Floerkit HTTP Server

JSON API over the library, for notebooks and scripts that would rather
POST a complex than shell out to the CLI. Run with
`gunicorn floerkit.server:app` in production.
"""

import logging
from flask import Flask

from floerkit import config
from floerkit.routes import api

logger = logging.getLogger(__name__)


def create_app() -> Flask:
    app = Flask(__name__, static_folder=None)
    app.config['JSON_SORT_KEYS'] = True
    app.register_blueprint(api)
    return app


app = create_app()


def run(host: str = config.HOST, port: int = config.PORT):
    logger.info(f"Starting Floerkit server on port {port}")
    app.run(host=host, port=port, debug=False)


if __name__ == '__main__':
    logging.basicConfig(
        level=config.get_log_level(),
        format=config.LOG_FORMAT
    )
    run()

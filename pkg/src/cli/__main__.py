"""Entry point: python -m src.cli <subcommand> ..."""

import logging
import sys
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables BEFORE importing config
project_root = Path(__file__).parent.parent.parent
load_dotenv(dotenv_path=project_root / ".env")

from ..config import Config  # noqa: E402
from .main import main  # noqa: E402

Config.validate()

logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

sys.exit(main())

import os
import logging
from dotenv import load_dotenv

load_dotenv()


class Config:
    # Logging
    LOG_LEVEL = os.getenv('DAMPEDQM_LOG_LEVEL', 'INFO').upper()
    LOG_FILE = os.getenv('DAMPEDQM_LOG_FILE', '')

    # Physics defaults
    DEFAULT_HBAR = float(os.getenv('DAMPEDQM_HBAR', '1.0'))

    # Verification settings
    VERIFY_SEED = int(os.getenv('DAMPEDQM_VERIFY_SEED', '20070123'))
    VERIFY_SAMPLES = int(os.getenv('DAMPEDQM_VERIFY_SAMPLES', '100'))

    # Sweep settings
    SWEEP_WORKERS = int(os.getenv('DAMPEDQM_SWEEP_WORKERS', '4'))

    @classmethod
    def validate(cls):
        """Validate configuration values"""
        problems = []

        if not isinstance(logging.getLevelName(cls.LOG_LEVEL), int):
            problems.append(f"DAMPEDQM_LOG_LEVEL={cls.LOG_LEVEL}")
        if not cls.DEFAULT_HBAR > 0:
            problems.append(f"DAMPEDQM_HBAR={cls.DEFAULT_HBAR}")
        if cls.VERIFY_SAMPLES < 1:
            problems.append(f"DAMPEDQM_VERIFY_SAMPLES={cls.VERIFY_SAMPLES}")
        if cls.SWEEP_WORKERS < 1:
            problems.append(f"DAMPEDQM_SWEEP_WORKERS={cls.SWEEP_WORKERS}")

        if problems:
            raise ValueError(f"Invalid configuration values: {', '.join(problems)}")

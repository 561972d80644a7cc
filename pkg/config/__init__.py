# Config package: settings loaded from .env

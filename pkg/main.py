# Re-export the CLI for `python main.py ...`
from laeo_gaze.cli import main

if __name__ == "__main__":
    main()

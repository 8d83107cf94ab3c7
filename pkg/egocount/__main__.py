from egocount.cli import main

raise SystemExit(main())

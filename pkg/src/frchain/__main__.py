from frchain.cli import main

raise SystemExit(main())

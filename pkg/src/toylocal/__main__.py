from toylocal.cli import main

raise SystemExit(main())

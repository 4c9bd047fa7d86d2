#pragma once

// Umbrella header pulling in the whole library.

#include "cctrace/capture.hpp"
#include "cctrace/cli.hpp"
#include "cctrace/config.hpp"
#include "cctrace/dissect.hpp"
#include "cctrace/errors.hpp"
#include "cctrace/folder.hpp"
#include "cctrace/glob.hpp"
#include "cctrace/pcap.hpp"
#include "cctrace/plist.hpp"
#include "cctrace/profile.hpp"
#include "cctrace/version.hpp"

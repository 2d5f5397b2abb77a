#pragma once

#include "velm/amino_acid.hpp"
#include "velm/backend.hpp"
#include "velm/error.hpp"
#include "velm/eval.hpp"
#include "velm/ingest.hpp"
#include "velm/notation.hpp"
#include "velm/profile_backend.hpp"
#include "velm/protocol.hpp"
#include "velm/remote_backend.hpp"
#include "velm/report.hpp"
#include "velm/run.hpp"
#include "velm/scorer.hpp"
#include "velm/sequence.hpp"
#include "velm/synthetic.hpp"
#include "velm/version.hpp"

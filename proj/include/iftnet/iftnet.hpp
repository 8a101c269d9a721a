#pragma once

#include "iftnet/common.hpp"
#include "iftnet/csv.hpp"
#include "iftnet/ergm/estimation.hpp"
#include "iftnet/ergm/model.hpp"
#include "iftnet/ergm/mple.hpp"
#include "iftnet/ergm/report.hpp"
#include "iftnet/ergm/sampler.hpp"
#include "iftnet/ergm/statistics.hpp"
#include "iftnet/gof.hpp"
#include "iftnet/graph.hpp"
#include "iftnet/motif.hpp"
#include "iftnet/multilevel.hpp"
#include "iftnet/netstats.hpp"
#include "iftnet/oracle.hpp"
#include "iftnet/pipeline.hpp"
#include "iftnet/segments.hpp"
#include "iftnet/synth.hpp"

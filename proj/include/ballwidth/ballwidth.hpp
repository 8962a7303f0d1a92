#pragma once

#include "ballwidth/antichain.hpp"
#include "ballwidth/bigint.hpp"
#include "ballwidth/certificate.hpp"
#include "ballwidth/cli.hpp"
#include "ballwidth/errors.hpp"
#include "ballwidth/flow.hpp"
#include "ballwidth/poset.hpp"
#include "ballwidth/report.hpp"
#include "ballwidth/sublayer.hpp"
#include "ballwidth/sweep.hpp"
#include "ballwidth/symmetric_chains.hpp"

#pragma once

#include "rag/constructions.hpp"
#include "rag/design.hpp"
#include "rag/dynamics.hpp"
#include "rag/efficiency.hpp"
#include "rag/errors.hpp"
#include "rag/experiments.hpp"
#include "rag/game.hpp"
#include "rag/io.hpp"
#include "rag/lp.hpp"
#include "rag/rules.hpp"
